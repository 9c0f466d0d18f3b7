#!/usr/bin/env python3
"""Independent oracle: expand Shor's code and compute exact sums used by the tests."""
from fractions import Fraction
from collections import defaultdict

def a(n):
    return "a" * n

words = [("b" + a(k)) for k in (0, 1, 7, 13, 14)]
words += [a(p) + "b" + a(k) for p in (3, 8) for k in (0, 2, 4, 6)]
words += [a(11) + "b" + a(k) for k in (0, 1, 2)]
assert len(set(words)) == 16

profile = defaultdict(int)
for w in words:
    profile[len(w)] += 2 ** w.count("a")
kraft = sum(Fraction(1, 2 ** len(w)) for w in words)
ternary = sum(Fraction(2 ** w.count("a"), 3 ** len(w)) for w in words)

for w in sorted(words, key=lambda w: (len(w), w)):
    print(w)
print("profile", dict(sorted(profile.items())))
print("kraft", kraft)
print("ternary", ternary)
