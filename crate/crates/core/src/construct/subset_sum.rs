//! Exact power-of-two subset sums.

use std::fmt;

use num_bigint::BigUint;
use serde::Serialize;

use super::ConstructError;
use crate::scalar::Count;

/// A finite multiset of exponents, each standing for the term `2^n`.
/// Stored in nonincreasing order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct ExponentMultiset(Vec<u32>);

impl ExponentMultiset {
    pub fn new<I: IntoIterator<Item = u32>>(exponents: I) -> Self {
        let mut v: Vec<u32> = exponents.into_iter().collect();
        v.sort_unstable_by(|x, y| y.cmp(x));
        ExponentMultiset(v)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> Option<u32> {
        self.0.first().copied()
    }

    /// `Σ 2^n`.
    pub fn total(&self) -> BigUint {
        self.0.iter().map(|&n| BigUint::pow2(n as usize)).sum()
    }

    /// Multiplicity-respecting containment.
    pub fn is_sub_multiset_of(&self, other: &ExponentMultiset) -> bool {
        let mut rest = other.0.iter().peekable();
        'outer: for x in &self.0 {
            for &y in rest.by_ref() {
                if y == *x {
                    continue 'outer;
                }
                if y < *x {
                    return false;
                }
            }
            return false;
        }
        true
    }
}

impl FromIterator<u32> for ExponentMultiset {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        ExponentMultiset::new(iter)
    }
}

impl fmt::Display for ExponentMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}")
    }
}

/// Picks a sub-multiset of `exponents` whose terms sum to exactly
/// `2^target`.
///
/// Requires every exponent `≤ target` and `Σ 2^n ≥ 2^target`. Exponents are
/// taken greedily in nonincreasing order whenever they still fit. Before an
/// exponent `j` is considered, both the running sum and `2^target` are
/// multiples of `2^j`, so any remaining gap is at least `2^j` and the greedy
/// never skips a useful term. (This is the recursive "two halves of
/// `2^(target-1)`" argument unrolled.)
pub fn subset_sum_exact(
    exponents: &ExponentMultiset,
    target: u32,
) -> Result<ExponentMultiset, ConstructError> {
    if let Some(max) = exponents.max().filter(|&m| m > target) {
        return Err(ConstructError::ExponentAboveTarget { exponent: max, target });
    }
    let goal = BigUint::pow2(target as usize);
    let total = exponents.total();
    if total < goal {
        return Err(ConstructError::SubsetSumShort { total, goal });
    }

    let mut picked = Vec::new();
    let mut sum = BigUint::from(0u32);
    for &n in exponents.as_slice() {
        if sum == goal {
            break;
        }
        let term = BigUint::pow2(n as usize);
        if &sum + &term <= goal {
            sum += term;
            picked.push(n);
        }
    }
    debug_assert_eq!(sum, goal);
    Ok(ExponentMultiset(picked))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(v: &[u32]) -> ExponentMultiset {
        ExponentMultiset::new(v.iter().copied())
    }

    /// Reachable sums by plain 0/1 knapsack over the multiset.
    fn dp_feasible(exponents: &[u32], goal: usize) -> bool {
        let mut reach = vec![false; goal + 1];
        reach[0] = true;
        for &n in exponents {
            let t = 1usize << n;
            for s in (t..=goal).rev() {
                reach[s] |= reach[s - t];
            }
        }
        reach[goal]
    }

    #[test]
    fn examples() {
        assert_eq!(subset_sum_exact(&ms(&[3]), 3).unwrap(), ms(&[3]));
        assert_eq!(subset_sum_exact(&ms(&[0, 0]), 1).unwrap(), ms(&[0, 0]));
        let out = subset_sum_exact(&ms(&[1, 1, 0, 0]), 2).unwrap();
        assert!(dp_feasible(&[1, 1, 0, 0], 4));
        assert_eq!(out, ms(&[1, 1]));
    }

    #[test]
    fn precondition_violations() {
        assert!(matches!(
            subset_sum_exact(&ms(&[3, 1]), 2),
            Err(ConstructError::ExponentAboveTarget { exponent: 3, target: 2 })
        ));
        assert!(matches!(subset_sum_exact(&ms(&[1, 0]), 2), Err(ConstructError::SubsetSumShort { .. })));
        assert!(matches!(subset_sum_exact(&ms(&[]), 0), Err(ConstructError::SubsetSumShort { .. })));
    }

    #[test]
    fn sub_multiset_relation() {
        assert!(ms(&[2, 1, 1]).is_sub_multiset_of(&ms(&[2, 2, 1, 1, 0])));
        assert!(!ms(&[1, 1, 1]).is_sub_multiset_of(&ms(&[2, 1, 1])));
        assert!(ms(&[]).is_sub_multiset_of(&ms(&[])));
        assert!(!ms(&[3]).is_sub_multiset_of(&ms(&[2])));
    }

    proptest::proptest! {
        #[test]
        fn greedy_hits_target_exactly(
            exps in proptest::collection::vec(0u32..10, 0..24),
            target in 0u32..10,
        ) {
            let a = ms(&exps);
            let capped = a.as_slice().iter().all(|&n| n <= target);
            match subset_sum_exact(&a, target) {
                Ok(sub) => {
                    proptest::prop_assert!(sub.is_sub_multiset_of(&a));
                    proptest::prop_assert_eq!(sub.total(), BigUint::pow2(target as usize));
                }
                Err(_) => proptest::prop_assert!(
                    !capped || a.total() < BigUint::pow2(target as usize)
                ),
            }
        }
    }
}
