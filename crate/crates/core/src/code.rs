//! Finite binary codes and the exact quantities attached to them.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{Count, Field};
use crate::word::{ParseWordError, Symbol, Word};
use crate::{Natural, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("a code must contain at least one word")]
    Empty,
    #[error("the empty word cannot be a code word")]
    EmptyWord,
    #[error("duplicate word {word}{}", line_suffix(*.line))]
    Duplicate { word: Word, line: Option<usize> },
    #[error("line {line}: {source}")]
    InvalidWord {
        line: usize,
        #[source]
        source: ParseWordError,
    },
    #[error("unknown builtin code {0:?} (available: shor)")]
    UnknownBuiltin(String),
}

fn line_suffix(line: Option<usize>) -> String {
    line.map(|l| format!(" on line {l}")).unwrap_or_default()
}

/// A nonempty finite set of nonempty binary words.
///
/// Unique decodability is not part of the type; see
/// [`crate::decodability`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Code {
    words: BTreeSet<Word>,
}

impl Code {
    /// Builds a code, rejecting an empty collection, the empty word, and
    /// repeated words.
    pub fn new<I: IntoIterator<Item = Word>>(words: I) -> Result<Self, CodeError> {
        let mut set = BTreeSet::new();
        for word in words {
            if word.is_empty() {
                return Err(CodeError::EmptyWord);
            }
            if set.contains(&word) {
                return Err(CodeError::Duplicate { word, line: None });
            }
            set.insert(word);
        }
        Self::from_set(set)
    }

    /// Wraps an already deduplicated set.
    pub fn from_set(words: BTreeSet<Word>) -> Result<Self, CodeError> {
        if words.is_empty() {
            return Err(CodeError::Empty);
        }
        if words.iter().any(Word::is_empty) {
            return Err(CodeError::EmptyWord);
        }
        Ok(Code { words })
    }

    /// Parses the line-oriented code file format: one word per line, `#`
    /// comments and blank lines ignored, duplicates rejected.
    pub fn parse(text: &str) -> Result<Self, CodeError> {
        let mut set = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let word: Word =
                line.parse().map_err(|source| CodeError::InvalidWord { line: idx + 1, source })?;
            if !set.insert(word.clone()) {
                return Err(CodeError::Duplicate { word, line: Some(idx + 1) });
            }
        }
        Self::from_set(set)
    }

    pub fn builtin(name: &str) -> Result<Self, CodeError> {
        name.parse::<Builtin>().map(Builtin::code)
    }

    pub fn words(&self) -> &BTreeSet<Word> {
        &self.words
    }

    pub fn into_words(self) -> BTreeSet<Word> {
        self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = &Word> + '_ {
        self.words.iter()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    /// Always false; present for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &Word) -> bool {
        self.words.contains(word)
    }

    pub fn max_len(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn is_prefix_free(&self) -> bool {
        is_prefix_free(&self.words)
    }

    /// `Σ 2^-|w|`, exact.
    pub fn kraft_sum(&self) -> Rational {
        self.kraft_sum_in()
    }

    pub fn kraft_sum_in<T: Field>(&self) -> T {
        self.words.iter().fold(T::zero(), |acc, w| acc + T::inv_pow(T::two(), w.len()))
    }

    /// `Σ 3^-|c| · 2^[c]_a`, exact.
    pub fn weighted_ternary_sum(&self) -> Rational {
        self.weighted_ternary_sum_in()
    }

    pub fn weighted_ternary_sum_in<T: Field>(&self) -> T {
        self.words
            .iter()
            .fold(T::zero(), |acc, w| acc + <T as Field>::pow2(w.count_a()) * T::inv_pow(T::three(), w.len()))
    }

    pub fn power_profile(&self) -> LengthProfile<Natural> {
        LengthProfile::of_words(&self.words)
    }

    pub fn power_profile_in<T: Count>(&self) -> LengthProfile<T> {
        LengthProfile::of_words(&self.words)
    }

    pub fn parikh_signature(&self) -> ParikhSignature {
        ParikhSignature::of_words(&self.words)
    }

    /// True iff some bijection between the codes preserves `[w]_a` and `[w]_b`.
    pub fn commutatively_equivalent(&self, other: &Code) -> bool {
        self.parikh_signature() == other.parikh_signature()
    }

    /// Code file text, one word per line in shortlex order.
    pub fn to_text(&self) -> String {
        let mut words: Vec<&Word> = self.words.iter().collect();
        words.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
        words.iter().map(|w| format!("{w}\n")).collect()
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for Code {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Code::parse(s)
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.words.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Code {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let words = Vec::<Word>::deserialize(deserializer)?;
        Code::new(words).map_err(serde::de::Error::custom)
    }
}

/// True iff no word of the set is a proper prefix of another.
///
/// In prefix-first lexicographic order every extension of `u` directly
/// follows `u`, so only neighbours need comparing.
pub fn is_prefix_free<'a, I>(words: I) -> bool
where
    I: IntoIterator<Item = &'a Word>,
{
    let mut sorted: Vec<&Word> = words.into_iter().collect();
    sorted.sort();
    sorted.windows(2).all(|pair| !pair[0].is_prefix_of(pair[1]))
}

/// `P_k = Σ_{|w| = k} 2^[w]_a` for each length `k` present.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct LengthProfile<T = BigUint> {
    entries: BTreeMap<usize, T>,
}

impl<T: Count> LengthProfile<T> {
    pub fn of_words<'a, I>(words: I) -> Self
    where
        I: IntoIterator<Item = &'a Word>,
    {
        let mut entries: BTreeMap<usize, T> = BTreeMap::new();
        for w in words {
            let slot = entries.entry(w.len()).or_insert_with(T::zero);
            *slot = slot.clone() + T::pow2(w.count_a());
        }
        LengthProfile { entries }
    }

    /// Builds a profile from explicit entries; zero entries are dropped so the
    /// key set stays the set of lengths actually used.
    pub fn from_entries<I: IntoIterator<Item = (usize, T)>>(entries: I) -> Self {
        LengthProfile { entries: entries.into_iter().filter(|(_, v)| !v.is_zero()).collect() }
    }

    pub fn get(&self, k: usize) -> T {
        self.entries.get(&k).cloned().unwrap_or_else(T::zero)
    }

    pub fn lengths(&self) -> BTreeSet<usize> {
        self.entries.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &T)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn entries(&self) -> &BTreeMap<usize, T> {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `amount` to the entry at `k`.
    pub fn add(&mut self, k: usize, amount: T) {
        if amount.is_zero() {
            return;
        }
        let slot = self.entries.entry(k).or_insert_with(T::zero);
        *slot = slot.clone() + amount;
    }
}

impl<T: fmt::Display> fmt::Display for LengthProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{k}:{v}")?;
        }
        Ok(())
    }
}

/// Multiset of `([w]_a, [w]_b)` pairs, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ParikhSignature(Vec<(usize, usize)>);

impl ParikhSignature {
    pub fn of_words<'a, I>(words: I) -> Self
    where
        I: IntoIterator<Item = &'a Word>,
    {
        let mut pairs: Vec<_> = words.into_iter().map(|w| (w.count(Symbol::A), w.count(Symbol::B))).collect();
        pairs.sort_unstable();
        ParikhSignature(pairs)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.0
    }
}

/// Codes shipped with the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// Shor's 16-word code that is not commutatively equivalent to any
    /// prefix-free code.
    Shor,
}

impl Builtin {
    pub fn code(self) -> Code {
        match self {
            Builtin::Shor => shor_code(),
        }
    }
}

impl FromStr for Builtin {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shor" => Ok(Builtin::Shor),
            other => Err(CodeError::UnknownBuiltin(other.to_string())),
        }
    }
}

// b{1, a, a^7, a^13, a^14} ∪ {a^3, a^8} b {1, a^2, a^4, a^6} ∪ a^11 b {1, a, a^2}
fn shor_code() -> Code {
    let a = |n| Word::repeat(Symbol::A, n);
    let b = Word::repeat(Symbol::B, 1);
    let product = |heads: &[usize], tails: &[usize]| -> Vec<Word> {
        heads
            .iter()
            .flat_map(|&h| tails.iter().map(move |&t| (h, t)))
            .map(|(h, t)| a(h).concat(&b).concat(&a(t)))
            .collect()
    };
    let mut words = product(&[0], &[0, 1, 7, 13, 14]);
    words.extend(product(&[3, 8], &[0, 2, 4, 6]));
    words.extend(product(&[11], &[0, 1, 2]));
    Code::new(words).expect("Shor's code has 16 distinct nonempty words")
}

#[cfg(test)]
pub(crate) fn code(words: &[&str]) -> Code {
    Code::new(words.iter().map(|s| s.parse().unwrap())).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::w;
    use num_rational::Ratio;

    fn profile(entries: &[(usize, u64)]) -> LengthProfile<Natural> {
        LengthProfile::from_entries(entries.iter().map(|&(k, v)| (k, BigUint::from(v))))
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn prefix_freeness() {
        assert!(code(&["a", "ba", "bb"]).is_prefix_free());
        assert!(!code(&["a", "ab"]).is_prefix_free());
        assert!(code(&["b"]).is_prefix_free());
        assert!(!code(&["ba", "b", "aa"]).is_prefix_free());
        // A prefix separated from its extension by other words in sort order.
        assert!(!code(&["a", "aab", "ab"]).is_prefix_free());
    }

    #[test]
    fn kraft_sums() {
        assert_eq!(code(&["a", "ba", "bb"]).kraft_sum(), rat(1, 1));
        assert_eq!(code(&["a"]).kraft_sum(), rat(1, 2));
        let shor = Code::builtin("shor").unwrap().kraft_sum();
        // scripts/shor_profile.py
        assert_eq!(shor, rat(13763, 16384));
        assert!(shor <= rat(1, 1));
    }

    #[test]
    fn ternary_sums() {
        assert_eq!(code(&["a"]).weighted_ternary_sum(), rat(2, 3));
        assert_eq!(code(&["b"]).weighted_ternary_sum(), rat(1, 3));
        assert_eq!(code(&["a", "ab"]).weighted_ternary_sum(), rat(8, 9));
        assert_eq!(Code::builtin("shor").unwrap().weighted_ternary_sum(), rat(11183447, 14348907));
    }

    #[test]
    fn sums_agree_across_scalar_types() {
        let c = code(&["a", "ab", "bba"]);
        let exact = c.kraft_sum();
        let small: Ratio<i64> = c.kraft_sum_in();
        assert_eq!(small, Ratio::new(7, 8));
        assert_eq!(exact, rat(7, 8));
        let approx: f64 = c.weighted_ternary_sum_in();
        assert!((approx - (2.0 / 3.0 + 2.0 / 9.0 + 2.0 / 27.0)).abs() < 1e-12);
    }

    #[test]
    fn power_profiles() {
        assert_eq!(code(&["a", "ba", "bb"]).power_profile(), profile(&[(1, 2), (2, 3)]));
        assert_eq!(code(&["b", "bb"]).power_profile(), profile(&[(1, 1), (2, 1)]));
        let small: LengthProfile<u64> = code(&["a", "ba", "bb"]).power_profile_in();
        assert_eq!(small.get(2), 3);
        assert_eq!(small.get(7), 0);
    }

    #[test]
    fn shor_profile_matches_independent_expansion() {
        // Frozen from scripts/shor_profile.py.
        let expected = profile(&[
            (1, 1),
            (2, 2),
            (4, 8),
            (6, 32),
            (8, 256),
            (9, 256),
            (10, 512),
            (11, 1024),
            (12, 2048),
            (13, 8192),
            (14, 16384),
            (15, 32768),
        ]);
        assert_eq!(Code::builtin("shor").unwrap().power_profile(), expected);
    }

    #[test]
    fn shor_contents() {
        let shor = Code::builtin("shor").unwrap();
        assert_eq!(shor.len(), 16);
        assert!(shor.contains(&w("b")));
        assert!(shor.contains(&w("aaaaaaaaaaabaa")));
        assert_eq!(shor.max_len(), 15);
        assert!(matches!(Code::builtin("kraft"), Err(CodeError::UnknownBuiltin(_))));
    }

    #[test]
    fn commutative_equivalence() {
        assert!(code(&["ab"]).commutatively_equivalent(&code(&["ba"])));
        assert!(!code(&["aab"]).commutatively_equivalent(&code(&["abb"])));
        assert!(!code(&["ab", "ba"]).commutatively_equivalent(&code(&["ab"])));
        assert!(code(&["ab", "b"]).commutatively_equivalent(&code(&["b", "ba"])));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Code::new(Vec::new()), Err(CodeError::Empty));
        assert_eq!(Code::new(vec![Word::empty()]), Err(CodeError::EmptyWord));
        assert!(matches!(Code::new(vec![w("a"), w("a")]), Err(CodeError::Duplicate { line: None, .. })));
    }

    #[test]
    fn file_format() {
        let c = Code::parse("# comment\n\nba\n  a \nbb\n").unwrap();
        assert_eq!(c, code(&["a", "ba", "bb"]));
        assert_eq!(c.to_text(), "a\nba\nbb\n");
        assert_eq!(Code::parse("a\nb\na\n"), Err(CodeError::Duplicate { word: w("a"), line: Some(3) }));
        assert!(matches!(Code::parse("ab\nac\n"), Err(CodeError::InvalidWord { line: 2, .. })));
        assert_eq!(Code::parse("# nothing\n"), Err(CodeError::Empty));
    }

    #[test]
    fn exact_sums_have_integer_numerators_at_max_length() {
        for c in [code(&["a", "ab", "bba"]), Code::builtin("shor").unwrap()] {
            let m = c.max_len();
            let kraft = c.kraft_sum() * Rational::from_integer(num_traits::pow(2.into(), m));
            let ternary = c.weighted_ternary_sum() * Rational::from_integer(num_traits::pow(3.into(), m));
            assert!(kraft.is_integer());
            assert!(ternary.is_integer());
            let direct_kraft: u64 = c.iter().map(|w| 1u64 << (m - w.len())).sum();
            let direct_ternary: u64 = c.iter().map(|w| 3u64.pow((m - w.len()) as u32) << w.count_a()).sum();
            assert_eq!(kraft.to_integer(), direct_kraft.into());
            assert_eq!(ternary.to_integer(), direct_ternary.into());
        }
    }
}
