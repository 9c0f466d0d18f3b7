//! Exhaustive property sweeps with failure collection.
//!
//! Every instance is checked on the main path. A seeded 1% sample is then
//! checked again through code paths that share as little as possible with
//! the main one (integer sums instead of rationals, pairwise prefix tests,
//! direct parse counting, alternative tree labelings).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::One;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::enumerate::{enumerate_codes, enumerate_symmetric_trees, CodeFilter};
use crate::code::{Code, LengthProfile};
use crate::construct::{
    code_from_lengths, prefixify_traced, subset_sum_exact, ConstructError, ExponentMultiset, StepAction,
};
use crate::correspondence::{code_to_tree, label_tree_by, project, tree_to_code, CorrespondenceError};
use crate::decodability::{agreement_bound, brute_force_ud, sardinas_patterson};
use crate::scalar::Count;
use crate::symtree::Tree;
use crate::word::Word;
use crate::Natural;

const SEED: u64 = 0x5eed_c0de;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    /// Decodable codes have Kraft sum at most 1.
    KraftForward,
    /// Decodable codes have weighted ternary sum (and Kraft sum) at most 1.
    Lemma1,
    /// Prefix-free codes lift to symmetric trees with matching leaf counts
    /// and come back unchanged.
    Theorem1Roundtrip,
    /// Symmetric trees of depth `≤ max_len` give prefix-free codes whose lift
    /// has the same canonical form.
    Theorem1Converse,
    /// Decodable codes prefixify to prefix-free codes with equal profile.
    Theorem2,
    /// Sardinas–Patterson agrees with the bounded brute-force search.
    SpVsBruteforce,
    /// Exact subset sums for exponent multisets: elements and targets up to
    /// `max_len`, multiplicities up to `max_words`.
    Lemma2,
    /// Length multisets of at most `max_words` lengths in `1..=max_len`
    /// realize as prefix-free codes exactly when their Kraft sum is `≤ 1`.
    KraftConverse,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::KraftForward,
        Property::Lemma1,
        Property::Theorem1Roundtrip,
        Property::Theorem1Converse,
        Property::Theorem2,
        Property::SpVsBruteforce,
        Property::Lemma2,
        Property::KraftConverse,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Property::KraftForward => "kraft_forward",
            Property::Lemma1 => "lemma1",
            Property::Theorem1Roundtrip => "theorem1_roundtrip",
            Property::Theorem1Converse => "theorem1_converse",
            Property::Theorem2 => "theorem2",
            Property::SpVsBruteforce => "sp_vs_bruteforce",
            Property::Lemma2 => "lemma2",
            Property::KraftConverse => "kraft_converse",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown property {0:?}")]
pub struct UnknownProperty(pub String);

impl FromStr for Property {
    type Err = UnknownProperty;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.as_str() == s || p.as_str().replace('_', "-") == s)
            .ok_or_else(|| UnknownProperty(s.to_owned()))
    }
}

/// Size limits of a sweep universe. For tree properties `max_len` is the
/// depth bound and `max_words` is unused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_words: usize,
    pub max_len: usize,
}

impl Bounds {
    pub fn new(max_words: usize, max_len: usize) -> Self {
        Bounds { max_words, max_len }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub input: String,
    pub expected: String,
    pub actual: String,
}

impl Failure {
    fn new(input: impl fmt::Display, expected: impl Into<String>, actual: impl Into<String>) -> Self {
        Failure { input: input.to_string(), expected: expected.into(), actual: actual.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub property: Property,
    pub bounds: Bounds,
    pub instances: usize,
    /// Instances re-checked through the independent paths.
    pub resampled: usize,
    pub failures: Vec<Failure>,
    /// Per-property counters, e.g. construction fallbacks.
    pub stats: BTreeMap<String, u64>,
    pub passed: bool,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SweepError {
    #[error("max_words must be at least 1")]
    NoWords,
    #[error("max_len must be at least 1")]
    NoLength,
}

/// Result of checking one instance on the main path.
#[derive(Default)]
struct Checked {
    failures: Vec<Failure>,
    stats: Vec<(&'static str, u64)>,
}

impl Checked {
    fn fail(&mut self, failure: Failure) {
        self.failures.push(failure);
    }

    fn count(&mut self, key: &'static str, n: u64) {
        self.stats.push((key, n));
    }
}

/// Runs `property` over its whole universe and collects every failure.
/// The report is identical across runs except for `wall_time_ms`.
pub fn run_sweep(property: Property, bounds: Bounds) -> Result<SweepReport, SweepError> {
    if bounds.max_words == 0 && property != Property::Theorem1Converse {
        return Err(SweepError::NoWords);
    }
    if bounds.max_len == 0 && !matches!(property, Property::Theorem1Converse | Property::Lemma2) {
        return Err(SweepError::NoLength);
    }
    let start = Instant::now();
    let seed = SEED ^ property as u64;
    let (instances, resampled, failures, stats) = match property {
        Property::KraftForward => {
            drive(decodable_codes(bounds), seed, check_kraft_forward, recheck_kraft_forward)
        }
        Property::Lemma1 => drive(decodable_codes(bounds), seed, check_lemma1, recheck_lemma1),
        Property::Theorem1Roundtrip => drive(
            enumerate_codes(bounds.max_words, bounds.max_len, CodeFilter::PrefixFree).collect(),
            seed,
            check_roundtrip,
            recheck_roundtrip,
        ),
        Property::Theorem1Converse => {
            drive(enumerate_symmetric_trees(bounds.max_len).collect(), seed, check_converse, recheck_converse)
        }
        Property::Theorem2 => drive(decodable_codes(bounds), seed, check_theorem2, recheck_theorem2),
        Property::SpVsBruteforce => drive(
            enumerate_codes(bounds.max_words, bounds.max_len, CodeFilter::All).collect(),
            seed,
            check_sp,
            recheck_sp,
        ),
        Property::Lemma2 => drive(lemma2_universe(bounds), seed, check_lemma2, recheck_lemma2),
        Property::KraftConverse => drive(
            length_multisets(bounds.max_words, bounds.max_len),
            seed,
            check_kraft_converse,
            recheck_kraft_converse,
        ),
    };
    Ok(SweepReport {
        property,
        bounds,
        instances,
        resampled,
        passed: failures.is_empty(),
        failures,
        stats,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

type Totals = (usize, usize, Vec<Failure>, BTreeMap<String, u64>);

fn drive<I, C, R>(items: Vec<I>, seed: u64, check: C, recheck: R) -> Totals
where
    I: Sync,
    C: Fn(&I) -> Checked + Sync + Send,
    R: Fn(&I) -> Vec<Failure> + Sync,
{
    let checked: Vec<Checked> = items.par_iter().map(check).collect();
    let mut failures = Vec::new();
    let mut stats: BTreeMap<String, u64> = BTreeMap::new();
    for c in checked {
        failures.extend(c.failures);
        for (key, n) in c.stats {
            *stats.entry(key.to_owned()).or_default() += n;
        }
    }

    let sample = sample_indices(items.len(), seed);
    let rechecked: Vec<Vec<Failure>> = sample.par_iter().map(|&i| recheck(&items[i])).collect();
    for f in rechecked.into_iter().flatten() {
        failures.push(Failure { expected: format!("independent check: {}", f.expected), ..f });
    }
    (items.len(), sample.len(), failures, stats)
}

/// About 1% of `0..n` (at least one index when `n > 0`), sorted.
fn sample_indices(n: usize, seed: u64) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    let amount = n.div_ceil(100);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, n, amount).into_vec();
    picked.sort_unstable();
    picked
}

fn decodable_codes(bounds: Bounds) -> Vec<Code> {
    let all: Vec<Code> = enumerate_codes(bounds.max_words, bounds.max_len, CodeFilter::All).collect();
    all.into_par_iter().filter(|c| sardinas_patterson(c).decodable).collect()
}

fn pow(base: u32, exp: usize) -> BigUint {
    BigUint::from(base).pow(exp as u32)
}

/// `Σ 2^(M-|w|)` against `2^M`.
fn integer_kraft_ok(code: &Code) -> bool {
    let m = code.max_len();
    code.iter().map(|w| pow(2, m - w.len())).sum::<BigUint>() <= pow(2, m)
}

/// `Σ 3^(M-|c|) 2^[c]_a` against `3^M`.
fn integer_ternary_ok(code: &Code) -> bool {
    let m = code.max_len();
    code.iter().map(|c| pow(3, m - c.len()) * pow(2, c.count_a())).sum::<BigUint>() <= pow(3, m)
}

fn pairwise_prefix_free<'a>(words: impl IntoIterator<Item = &'a Word>) -> bool {
    let words: Vec<&Word> = words.into_iter().collect();
    words.iter().tuple_combinations().all(|(x, y)| !x.is_prefix_of(y) && !y.is_prefix_of(x))
}

fn direct_profile(code: &Code) -> BTreeMap<usize, BigUint> {
    let mut out: BTreeMap<usize, BigUint> = BTreeMap::new();
    for w in code.iter() {
        *out.entry(w.len()).or_default() += pow(2, w.count_a());
    }
    out
}

fn profile_text(p: &LengthProfile<Natural>) -> String {
    p.to_string()
}

/// Number of factorizations of `text` into code words.
fn parse_count(code: &Code, text: &Word) -> BigUint {
    let symbols = text.symbols();
    let mut ways = vec![BigUint::from(0u32); symbols.len() + 1];
    ways[0] = BigUint::one();
    for end in 1..=symbols.len() {
        for w in code.iter().filter(|w| w.len() <= end) {
            if symbols[end - w.len()..end] == *w.symbols() {
                let add = ways[end - w.len()].clone();
                ways[end] += add;
            }
        }
    }
    ways.pop().unwrap()
}

fn check_kraft_forward(code: &Code) -> Checked {
    let mut c = Checked::default();
    let kraft = code.kraft_sum();
    if kraft > crate::Rational::one() {
        c.fail(Failure::new(code, "kraft_sum <= 1", kraft.to_string()));
    }
    c
}

fn recheck_kraft_forward(code: &Code) -> Vec<Failure> {
    let mut out = Vec::new();
    if let Ok(v) = brute_force_ud(code, agreement_bound(code)) {
        if !v.decodable {
            out.push(Failure::new(code, "decodable", "brute force found an ambiguity"));
        }
    }
    if !integer_kraft_ok(code) {
        out.push(Failure::new(code, "integer Kraft sum <= 2^M", "exceeded"));
    }
    out
}

fn check_lemma1(code: &Code) -> Checked {
    let mut c = check_kraft_forward(code);
    let ternary = code.weighted_ternary_sum();
    if ternary > crate::Rational::one() {
        c.fail(Failure::new(code, "weighted_ternary_sum <= 1", ternary.to_string()));
    }
    c
}

fn recheck_lemma1(code: &Code) -> Vec<Failure> {
    let mut out = recheck_kraft_forward(code);
    if !integer_ternary_ok(code) {
        out.push(Failure::new(code, "integer ternary sum <= 3^M", "exceeded"));
    }
    out
}

fn check_roundtrip(code: &Code) -> Checked {
    let mut c = Checked::default();
    let labeled = code_to_tree(code);
    let tree = labeled.tree();
    if let Some(v) = tree.asymmetric_vertex() {
        c.fail(Failure::new(code, "symmetric tree", format!("asymmetric at vertex {v:?}")));
    }
    let counts = tree.leaf_counts();
    let profile = code.power_profile();
    let depths =
        counts.depths().into_iter().chain(profile.lengths()).collect::<std::collections::BTreeSet<_>>();
    for k in depths {
        if counts.get(k) != profile.get(k) {
            c.fail(Failure::new(code, format!("|L_{k}| = {}", profile.get(k)), counts.get(k).to_string()));
        }
    }
    match tree_to_code(tree) {
        Ok(back) if back == *code => {}
        Ok(back) => c.fail(Failure::new(code, code.to_string(), back.to_string())),
        Err(e) => c.fail(Failure::new(code, code.to_string(), e.to_string())),
    }
    c
}

fn recheck_roundtrip(code: &Code) -> Vec<Failure> {
    let mut out = Vec::new();
    let labeled = code_to_tree(code);
    let mut per_word: BTreeMap<Word, u64> = BTreeMap::new();
    for leaf in labeled.tree().leaves() {
        *per_word.entry(project(&labeled.ternary_word(leaf))).or_default() += 1;
    }
    let expected: BTreeMap<Word, u64> = code.iter().map(|w| (w.clone(), 1u64 << w.count_a())).collect();
    if per_word != expected {
        out.push(Failure::new(code, "2^[w]_a leaves over each code word", format!("{per_word:?}")));
    }
    // Any admissible a/a⁻¹ pairing reads back the same code.
    match label_tree_by(labeled.tree(), &|_, pairs| *pairs.last().unwrap()) {
        Ok(other) if other.projected_leaves() == *code.words() => {}
        Ok(other) => out.push(Failure::new(
            code,
            "same code under last pairing",
            format!("{:?}", other.projected_leaves()),
        )),
        Err(e) => out.push(Failure::new(code, "labelable tree", e.to_string())),
    }
    out
}

fn check_converse(tree: &Tree) -> Checked {
    let mut c = Checked::default();
    let form = tree.canonical_form();
    match tree_to_code(tree) {
        Err(CorrespondenceError::SingleVertex) if tree.len() == 1 => c.count("single_vertex", 1),
        Err(e) => c.fail(Failure::new(&form, "a prefix-free code", e.to_string())),
        Ok(code) => {
            if !code.is_prefix_free() {
                c.fail(Failure::new(&form, "prefix-free code", code.to_string()));
            }
            let back = code_to_tree(&code).tree().canonical_form();
            if back != form {
                c.fail(Failure::new(&form, form.to_string(), back.to_string()));
            }
        }
    }
    c
}

fn recheck_converse(tree: &Tree) -> Vec<Failure> {
    let form = tree.canonical_form();
    let Ok(code) = tree_to_code(tree) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    if !pairwise_prefix_free(code.iter()) {
        out.push(Failure::new(&form, "pairwise prefix-free", code.to_string()));
    }
    let leaves: BTreeMap<usize, BigUint> = tree.leaf_counts().iter().map(|(k, n)| (k, n.clone())).collect();
    if leaves != direct_profile(&code) {
        out.push(Failure::new(&form, "leaf counts equal to the code profile", code.to_string()));
    }
    out
}

fn check_theorem2(code: &Code) -> Checked {
    let mut c = Checked::default();
    match prefixify_traced(code) {
        Err(e) => c.fail(Failure::new(code, "a prefix-free code", e.to_string())),
        Ok(result) => {
            if result.steps.is_empty() {
                c.count("already_prefix_free", 1);
            }
            c.count("oracle_fallbacks", result.fallbacks() as u64);
            c.count("vacancy_shifts", result.shifts() as u64);
            let light = result
                .steps
                .iter()
                .flat_map(|s| &s.trace.actions)
                .filter(|a| matches!(a, StepAction::LowSubsetSum { .. }))
                .count();
            c.count("low_subset_sums", light as u64);
            if !result.code.is_prefix_free() {
                c.fail(Failure::new(code, "prefix-free output", result.code.to_string()));
            }
            let (want, got) = (code.power_profile(), result.code.power_profile());
            if want != got {
                c.fail(Failure::new(code, profile_text(&want), profile_text(&got)));
            }
        }
    }
    c
}

fn recheck_theorem2(code: &Code) -> Vec<Failure> {
    let Ok(out) = prefixify_traced(code) else {
        return vec![Failure::new(code, "a prefix-free code", "construction failed")];
    };
    let mut fails = Vec::new();
    if !pairwise_prefix_free(out.code.iter()) {
        fails.push(Failure::new(code, "pairwise prefix-free", out.code.to_string()));
    }
    if direct_profile(code) != direct_profile(&out.code) {
        fails.push(Failure::new(code, "equal direct profile", out.code.to_string()));
    }
    fails
}

fn check_sp(code: &Code) -> Checked {
    let mut c = Checked::default();
    let sp = sardinas_patterson(code);
    let bound = agreement_bound(code);
    let bf = match brute_force_ud(code, bound) {
        Ok(v) => v,
        Err(e) => {
            c.fail(Failure::new(code, "brute force runs", e.to_string()));
            return c;
        }
    };
    if !sp.decodable {
        c.count("not_decodable", 1);
    }
    if sp.decodable != bf.decodable {
        c.fail(Failure::new(
            code,
            format!("brute force (bound {bound}) decodable = {}", bf.decodable),
            format!("sardinas_patterson decodable = {}", sp.decodable),
        ));
    }
    for (who, verdict) in [("sardinas_patterson", &sp), ("brute_force_ud", &bf)] {
        if let Some(w) = &verdict.witness {
            if !w.is_valid_for(code) {
                c.fail(Failure::new(code, format!("valid {who} witness"), w.word.to_string()));
            }
        }
    }
    c
}

fn recheck_sp(code: &Code) -> Vec<Failure> {
    let sp = sardinas_patterson(code);
    match sp.witness {
        Some(w) => {
            let n = parse_count(code, &w.word);
            if n < BigUint::from(2u32) {
                return vec![Failure::new(code, format!("{} has two parses", w.word), n.to_string())];
            }
        }
        None => {
            let limit = agreement_bound(code).min(10);
            for len in 1..=limit {
                if let Some(text) = Word::all_of_length(len).find(|t| parse_count(code, t) > BigUint::one()) {
                    return vec![Failure::new(code, "no ambiguous text", text.to_string())];
                }
            }
        }
    }
    Vec::new()
}

/// `(multiset, N)` pairs meeting the subset-sum precondition.
fn lemma2_universe(bounds: Bounds) -> Vec<(ExponentMultiset, u32)> {
    let mut out = Vec::new();
    for target in 0..=bounds.max_len as u32 {
        let choices = (0..=target).map(|_| 0..=bounds.max_words).multi_cartesian_product();
        for mult in choices {
            let exps: Vec<u32> =
                mult.iter().enumerate().flat_map(|(n, &k)| std::iter::repeat_n(n as u32, k)).collect();
            let total: u64 = exps.iter().map(|&n| 1u64 << n).sum();
            if total >= 1u64 << target {
                out.push((ExponentMultiset::new(exps), target));
            }
        }
    }
    out
}

/// Which sums up to `goal` are reachable by a 0/1 choice of items.
fn reachable(items: &[u64], goal: u64) -> Vec<bool> {
    let mut reach = vec![false; goal as usize + 1];
    reach[0] = true;
    for &x in items {
        for s in (x..=goal).rev() {
            if reach[(s - x) as usize] {
                reach[s as usize] = true;
            }
        }
    }
    reach
}

fn check_lemma2((exps, target): &(ExponentMultiset, u32)) -> Checked {
    let mut c = Checked::default();
    let input = format!("{exps} -> 2^{target}");
    match subset_sum_exact(exps, *target) {
        Err(e) => c.fail(Failure::new(input, "a subset", e.to_string())),
        Ok(pick) => {
            let sum: BigUint = pick.as_slice().iter().map(|&n| BigUint::pow2(n as usize)).sum();
            if sum != BigUint::pow2(*target as usize) || !pick.is_sub_multiset_of(exps) {
                c.fail(Failure::new(
                    input,
                    format!("sub-multiset summing to {}", 1u64 << target),
                    pick.to_string(),
                ));
            }
        }
    }
    c
}

fn recheck_lemma2((exps, target): &(ExponentMultiset, u32)) -> Vec<Failure> {
    let items: Vec<u64> = exps.as_slice().iter().map(|&n| 1u64 << n).collect();
    let goal = 1u64 << target;
    let input = format!("{exps} -> 2^{target}");
    if !reachable(&items, goal)[goal as usize] {
        return vec![Failure::new(input, "knapsack reaches the target", "unreachable")];
    }
    let Ok(pick) = subset_sum_exact(exps, *target) else {
        return vec![Failure::new(input, "a subset", "error")];
    };
    let mut left = exps.as_slice().to_vec();
    for n in pick.as_slice() {
        match left.iter().position(|x| x == n) {
            Some(i) => {
                left.remove(i);
            }
            None => return vec![Failure::new(input, "picked from the input", pick.to_string())],
        }
    }
    if pick.as_slice().iter().map(|&n| 1u64 << n).sum::<u64>() != goal {
        return vec![Failure::new(input, goal.to_string(), pick.to_string())];
    }
    Vec::new()
}

/// Every multiset of `1..=max_words` lengths drawn from `1..=max_len`, as a
/// nondecreasing list.
fn length_multisets(max_words: usize, max_len: usize) -> Vec<Vec<usize>> {
    (1..=max_words).flat_map(|n| (1..=max_len).combinations_with_replacement(n)).collect()
}

fn kraft_fits(lengths: &[usize]) -> bool {
    let m = *lengths.iter().max().unwrap();
    lengths.iter().map(|&l| 1u128 << (m - l)).sum::<u128>() <= 1u128 << m
}

fn check_kraft_converse(lengths: &Vec<usize>) -> Checked {
    let mut c = Checked::default();
    let input = format!("{lengths:?}");
    match (code_from_lengths(lengths), kraft_fits(lengths)) {
        (Ok(code), true) => {
            let mut got: Vec<usize> = code.iter().map(Word::len).collect();
            got.sort_unstable();
            if !code.is_prefix_free() || got != *lengths {
                c.fail(Failure::new(input, "prefix-free code with these lengths", code.to_string()));
            }
            c.count("realized", 1);
        }
        (Err(ConstructError::KraftViolation(_)), false) => c.count("rejected", 1),
        (Ok(code), false) => c.fail(Failure::new(input, "Kraft violation", code.to_string())),
        (Err(e), _) => c.fail(Failure::new(input, "a code", e.to_string())),
    }
    c
}

fn recheck_kraft_converse(lengths: &Vec<usize>) -> Vec<Failure> {
    match code_from_lengths(lengths) {
        Ok(code) if !pairwise_prefix_free(code.iter()) => {
            vec![Failure::new(format!("{lengths:?}"), "pairwise prefix-free", code.to_string())]
        }
        _ => Vec::new(),
    }
}
