//! Complete backtracking search for a prefix-free code with a given power
//! profile.
//!
//! Which words of a level block which words further down depends only on
//! their `a`-counts: a word of length `k0` with `j0` letters `a` blocks
//! `C(k - k0, j - j0)` words of length `k` with `j` letters `a`. The search
//! therefore works on class counts and only realizes actual words at the
//! end, taking the lexicographically least free words of each class.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::binomial;
use num_traits::ToPrimitive;

use super::ConstructError;
use crate::code::{Code, LengthProfile};
use crate::word::Word;
use crate::Natural;

/// Chosen class counts `n_k(j)` for one level `k`.
type LevelChoice = (usize, Vec<u128>);

/// Searches levels in ascending length. At each level the decompositions
/// `Σ_j n_k(j)·2^j = P_k` are tried with larger `a`-counts first, each
/// bounded by the currently free class sizes; dead ends backtrack across
/// levels. Returns `None` when no prefix-free code with this profile uses
/// only these lengths.
pub fn prefixify_oracle(
    profile: &LengthProfile<Natural>,
    lengths: &BTreeSet<usize>,
) -> Result<Option<Code>, ConstructError> {
    if *lengths != profile.lengths() {
        return Err(ConstructError::OracleLengths);
    }
    let mut targets = Vec::with_capacity(lengths.len());
    for (k, p) in profile.iter() {
        if k == 0 || k >= 127 {
            return Err(ConstructError::OracleLengths);
        }
        let p = p.to_u128().ok_or(ConstructError::OracleTooLarge)?;
        targets.push((k, p));
    }

    let mut chosen: Vec<LevelChoice> = Vec::new();
    if !search(&targets, &mut chosen) {
        return Ok(None);
    }
    Ok(Some(realize(&chosen)))
}

fn search(targets: &[(usize, u128)], chosen: &mut Vec<LevelChoice>) -> bool {
    let Some(&(k, p)) = targets.get(chosen.len()) else {
        return true;
    };
    let free = free_classes(k, chosen);
    let mut counts = vec![0u128; k + 1];
    decompose(&free, k as isize, p, &mut counts, &mut |counts| {
        chosen.push((k, counts.to_vec()));
        if search(targets, chosen) {
            return true;
        }
        chosen.pop();
        false
    })
}

/// Free words of length `k` per `a`-count, given the earlier levels.
fn free_classes(k: usize, chosen: &[LevelChoice]) -> Vec<u128> {
    (0..=k)
        .map(|j| {
            let blocked: u128 = chosen
                .iter()
                .map(|(k0, n)| {
                    n.iter()
                        .enumerate()
                        .filter(|&(j0, &c)| c > 0 && j0 <= j && j - j0 <= k - k0)
                        .map(|(j0, &c)| c * binomial((k - k0) as u128, (j - j0) as u128))
                        .sum::<u128>()
                })
                .sum();
            binomial(k as u128, j as u128) - blocked
        })
        .collect()
}

/// Enumerates `counts[0..=j]` with `Σ counts[i]·2^i = rest` and
/// `counts[i] ≤ free[i]`, highest class first and largest count first.
fn decompose(
    free: &[u128],
    j: isize,
    rest: u128,
    counts: &mut [u128],
    visit: &mut dyn FnMut(&[u128]) -> bool,
) -> bool {
    if rest == 0 {
        return visit(counts);
    }
    if j < 0 {
        return false;
    }
    let ju = j as usize;
    let capacity = (0..=ju).fold(0u128, |acc, i| acc.saturating_add(free[i].saturating_mul(1 << i)));
    if capacity < rest {
        return false;
    }
    let most = free[ju].min(rest >> ju);
    for n in (0..=most).rev() {
        counts[ju] = n;
        if decompose(free, j - 1, rest - (n << ju), counts, visit) {
            return true;
        }
    }
    counts[ju] = 0;
    false
}

fn realize(chosen: &[LevelChoice]) -> Code {
    let mut words: BTreeSet<Word> = BTreeSet::new();
    for (k, counts) in chosen {
        let mut need: BTreeMap<usize, u128> =
            counts.iter().enumerate().filter(|(_, &n)| n > 0).map(|(j, &n)| (j, n)).collect();
        for w in Word::all_of_length(*k) {
            if need.is_empty() {
                break;
            }
            let j = w.count_a();
            let Some(n) = need.get_mut(&j) else { continue };
            if (1..=w.len()).any(|len| words.contains(&w.prefix(len))) {
                continue;
            }
            *n -= 1;
            if *n == 0 {
                need.remove(&j);
            }
            words.insert(w);
        }
        assert!(need.is_empty(), "class counts were checked against free slots");
    }
    Code::from_set(words).expect("nonempty profile yields words")
}
