//! Turning a uniquely decodable code into a prefix-free code with the same
//! power profile.
//!
//! Words are added one at a time in nondecreasing length. Each addition
//! needs leaf weight `2^[c]_a` at depth `|c|` among the free slots of the
//! current prefix-free code; the free weight is
//! `3^M - Σ_d 3^(M-|d|) 2^[d]_a`, which the ternary McMillan-type bound keeps
//! at least `2^[c]_a` for decodable inputs.

mod kraft;
mod occupancy;
mod oracle;
mod step;
mod subset_sum;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

pub use kraft::code_from_lengths;
pub use occupancy::OccupancyTable;
pub use oracle::prefixify_oracle;
pub use step::{add_word_step, available_words, StepAction, StepTrace};
pub use subset_sum::{subset_sum_exact, ExponentMultiset};

use crate::code::{Code, LengthProfile};
use crate::decodability::{sardinas_patterson, Witness};
use crate::word::Word;
use crate::{Natural, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("exponent {exponent} exceeds the target exponent {target}")]
    ExponentAboveTarget { exponent: u32, target: u32 },
    #[error("exponents sum to {total}, short of the target {goal}")]
    SubsetSumShort { total: Natural, goal: Natural },
    #[error("partial code is not prefix-free")]
    NotPrefixFree,
    #[error("word {word} is longer than the step length {length}")]
    WordTooLong { word: Word, length: usize },
    #[error("exponent {exponent} exceeds the word length {length}")]
    ExponentTooLarge { exponent: usize, length: usize },
    #[error("free weight {available} at depth {length} is below the required {needed}")]
    Infeasible { available: Natural, needed: Natural, length: usize },
    #[error("add-word step failed: {reason}")]
    StepFailed { reason: String, trace: Box<StepTrace> },
    #[error("input is not uniquely decodable: {} has two factorizations", .0.word)]
    NotDecodable(Box<Witness>),
    #[error("construction failed while adding {word}: {source}")]
    ConstructionFailure {
        word: Word,
        #[source]
        source: Box<ConstructError>,
    },
    #[error("search lengths must equal the profile's lengths (all positive)")]
    OracleLengths,
    #[error("profile entry too large for the complete search")]
    OracleTooLarge,
    #[error("length multiset is empty")]
    NoLengths,
    #[error("code word lengths must be positive")]
    ZeroLength,
    #[error("Kraft sum {0} exceeds 1")]
    KraftViolation(Rational),
}

/// One fold step of [`prefixify_traced`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub word: Word,
    pub trace: StepTrace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prefixified {
    pub code: Code,
    /// Empty when the input was already prefix-free.
    pub steps: Vec<StepRecord>,
}

impl Prefixified {
    pub fn fallbacks(&self) -> usize {
        self.steps.iter().map(|s| s.trace.fallbacks()).sum()
    }

    pub fn shifts(&self) -> usize {
        self.steps.iter().map(|s| s.trace.shifts()).sum()
    }

    /// The whole run as JSON lines, one action per line.
    pub fn trace_json_lines(&self) -> String {
        self.steps.iter().enumerate().map(|(i, s)| s.trace.to_json_lines(i, Some(&s.word))).collect()
    }
}

/// A prefix-free code with the same power profile as `code`.
pub fn prefixify(code: &Code) -> Result<Code, ConstructError> {
    prefixify_traced(code).map(|p| p.code)
}

/// [`prefixify`] keeping the per-word step traces.
///
/// Prefix-free inputs come back unchanged. Otherwise the words are processed
/// by nondecreasing length (lexicographic within a length) so that each one
/// is of maximal length among those processed so far.
pub fn prefixify_traced(code: &Code) -> Result<Prefixified, ConstructError> {
    let verdict = sardinas_patterson(code);
    if let Some(witness) = verdict.witness {
        return Err(ConstructError::NotDecodable(Box::new(witness)));
    }
    if code.is_prefix_free() {
        return Ok(Prefixified { code: code.clone(), steps: Vec::new() });
    }

    let mut order: Vec<&Word> = code.iter().collect();
    order.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));

    let mut words: BTreeSet<Word> = BTreeSet::new();
    let mut steps = Vec::with_capacity(order.len());
    for word in order {
        let (next, trace) = add_word_step(&words, word.count_a(), word.len())
            .map_err(|e| ConstructError::ConstructionFailure { word: word.clone(), source: Box::new(e) })?;
        words = next;
        steps.push(StepRecord { word: word.clone(), trace });
    }

    let out = Code::from_set(words).expect("at least one word was added");
    let target: LengthProfile<Natural> = code.power_profile();
    if !out.is_prefix_free() || out.power_profile() != target {
        let last = code.iter().max_by_key(|w| w.len()).cloned().unwrap_or_default();
        return Err(ConstructError::ConstructionFailure {
            word: last,
            source: Box::new(ConstructError::StepFailed {
                reason: "final code does not match the input profile".into(),
                trace: Box::new(steps.last().map(|s| s.trace.clone()).expect("nonempty")),
            }),
        });
    }
    Ok(Prefixified { code: out, steps })
}
