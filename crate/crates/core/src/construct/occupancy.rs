use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::binomial;
use serde::Serialize;

use crate::scalar::Count;
use crate::word::Word;

/// `w_m(j)`: how many words of length `m` carry exactly `j` letters `a`,
/// for every length `m` present in the code and every `0 ≤ j ≤ m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OccupancyTable {
    levels: BTreeMap<usize, Vec<usize>>,
}

impl OccupancyTable {
    pub fn of_words<'a, I: IntoIterator<Item = &'a Word>>(words: I) -> Self {
        let mut levels: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for w in words {
            levels.entry(w.len()).or_insert_with(|| vec![0; w.len() + 1])[w.count_a()] += 1;
        }
        OccupancyTable { levels }
    }

    /// `w_m(j)`; zero outside the table.
    pub fn get(&self, m: usize, j: usize) -> usize {
        self.levels.get(&m).and_then(|row| row.get(j)).copied().unwrap_or(0)
    }

    /// The length set `I`.
    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.levels.keys().copied()
    }

    pub fn row(&self, m: usize) -> Option<&[usize]> {
        self.levels.get(&m).map(Vec::as_slice)
    }

    /// Number of code words of length `m`.
    pub fn words_at(&self, m: usize) -> usize {
        self.row(m).map(|r| r.iter().sum()).unwrap_or(0)
    }

    /// `Σ_k 2^k · w_m(k)`, the leaf count of level `m` in the symmetric tree.
    pub fn level_weight(&self, m: usize) -> BigUint {
        self.row(m).unwrap_or(&[]).iter().enumerate().map(|(k, &n)| BigUint::pow2(k) * BigUint::from(n)).sum()
    }

    /// Whether `w_m(j) < C(m, j)`.
    pub fn has_vacancy(&self, m: usize, j: usize) -> bool {
        j <= m && (self.get(m, j) as u128) < binomial(m as u128, j as u128)
    }
}
