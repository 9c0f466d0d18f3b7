//! One inductive step of the prefixification: add leaf weight `2^e` at
//! depth `M` to a prefix-free code without disturbing shorter levels.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::Serialize;

use super::occupancy::OccupancyTable;
use super::oracle::prefixify_oracle;
use super::subset_sum::{subset_sum_exact, ExponentMultiset};
use super::ConstructError;
use crate::code::{is_prefix_free, LengthProfile};
use crate::scalar::Count;
use crate::word::{Symbol, Word};
use crate::Natural;

/// One action of an add-word step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum StepAction {
    /// `e = 0`: the all-`b` word of length `M` is added.
    OnlyB { added: Word },
    /// Every free length-`M` word has at most `e` letters `a`; a subset of
    /// them with weight exactly `2^e` is added.
    SubsetSum { selection: ExponentMultiset, added: Vec<Word> },
    /// Padding and shifting found nothing, but the free length-`M` words
    /// with at most `e` letters `a` weigh at least `2^e`; an exact subset of
    /// those is added.
    LowSubsetSum { selection: ExponentMultiset, added: Vec<Word> },
    /// A free word `missing` of length `level` with `a_count` letters `a` is
    /// padded with `a`s then `b`s up to length `M`.
    MissingWord { level: usize, a_count: usize, missing: Word, added: Word },
    /// Two words of level `level` with `a_count - 1` letters `a` are traded
    /// for one word with `a_count` letters `a`.
    VacancyShift { level: usize, a_count: usize, deleted: [Word; 2], added: Word },
    /// The guided path found no valid configuration and the complete search
    /// supplied one.
    OracleFallback { reason: String, removed: Vec<Word>, added: Vec<Word> },
}

impl StepAction {
    pub fn removed(&self) -> Vec<&Word> {
        match self {
            StepAction::VacancyShift { deleted, .. } => deleted.iter().collect(),
            StepAction::OracleFallback { removed, .. } => removed.iter().collect(),
            _ => Vec::new(),
        }
    }

    pub fn added(&self) -> Vec<&Word> {
        match self {
            StepAction::OnlyB { added } => vec![added],
            StepAction::SubsetSum { added, .. }
            | StepAction::LowSubsetSum { added, .. }
            | StepAction::OracleFallback { added, .. } => added.iter().collect(),
            StepAction::MissingWord { added, .. } | StepAction::VacancyShift { added, .. } => {
                vec![added]
            }
        }
    }
}

/// Ordered record of everything one step did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepTrace {
    /// `M`.
    pub length: usize,
    /// `e`.
    pub exponent: usize,
    pub actions: Vec<StepAction>,
}

impl StepTrace {
    fn new(length: usize, exponent: usize) -> Self {
        StepTrace { length, exponent, actions: Vec::new() }
    }

    /// Applies the recorded actions to the pre-step word set.
    pub fn replay(&self, before: &BTreeSet<Word>) -> BTreeSet<Word> {
        let mut words = before.clone();
        for action in &self.actions {
            for w in action.removed() {
                words.remove(w);
            }
            for w in action.added() {
                words.insert(w.clone());
            }
        }
        words
    }

    pub fn fallbacks(&self) -> usize {
        self.actions.iter().filter(|a| matches!(a, StepAction::OracleFallback { .. })).count()
    }

    pub fn shifts(&self) -> usize {
        self.actions.iter().filter(|a| matches!(a, StepAction::VacancyShift { .. })).count()
    }

    /// One JSON object per action, each tagged with the step's metadata.
    pub fn to_json_lines(&self, step: usize, word: Option<&Word>) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            step: usize,
            #[serde(skip_serializing_if = "Option::is_none")]
            word: Option<&'a Word>,
            length: usize,
            exponent: usize,
            #[serde(flatten)]
            action: &'a StepAction,
        }
        self.actions
            .iter()
            .map(|action| {
                let line = Line { step, word, length: self.length, exponent: self.exponent, action };
                serde_json::to_string(&line).expect("trace lines serialize") + "\n"
            })
            .collect()
    }
}

/// Every `w ∈ {a,b}^length` with no word of `code` as a prefix.
pub fn available_words(code: &BTreeSet<Word>, length: usize) -> Result<BTreeSet<Word>, ConstructError> {
    check_partial_code(code, length)?;
    let mut out = BTreeSet::new();
    let mut prefix = Word::empty();
    collect_free(code, length, &mut prefix, &mut out);
    Ok(out)
}

fn collect_free(code: &BTreeSet<Word>, length: usize, prefix: &mut Word, out: &mut BTreeSet<Word>) {
    if code.contains(prefix) {
        return;
    }
    if prefix.len() == length {
        out.insert(prefix.clone());
        return;
    }
    for s in Symbol::ALL {
        prefix.push(s);
        collect_free(code, length, prefix, out);
        prefix.pop();
    }
}

fn check_partial_code(code: &BTreeSet<Word>, length: usize) -> Result<(), ConstructError> {
    if !is_prefix_free(code) {
        return Err(ConstructError::NotPrefixFree);
    }
    if let Some(long) = code.iter().find(|w| w.len() > length) {
        return Err(ConstructError::WordTooLong { word: long.clone(), length });
    }
    Ok(())
}

/// `u` is neither blocked by a shorter-or-equal code word nor a prefix of
/// one: its whole slot in the binary tree is free.
fn slot_free(code: &BTreeSet<Word>, u: &Word) -> bool {
    let blocked_above = (0..=u.len()).any(|k| code.contains(&u.prefix(k)));
    let blocked_below = code.range(u.clone()..).next().is_some_and(|w| u.is_prefix_of(w));
    !blocked_above && !blocked_below
}

/// Lexicographically least slot-free word of length `m` with `j` letters `a`.
fn least_free_word(code: &BTreeSet<Word>, m: usize, j: usize) -> Option<Word> {
    Word::all_of_length(m).find(|u| u.count_a() == j && slot_free(code, u))
}

/// `[max(0, e - (M - m)), min(m, e)]`: the `a`-counts a length-`m` word can
/// have and still be padded to length `M` with exactly `e` letters `a`.
fn admissible_window(m: usize, e: usize, length: usize) -> Option<(usize, usize)> {
    let lo = e.saturating_sub(length - m);
    let hi = m.min(e);
    (lo <= hi).then_some((lo, hi))
}

/// Adds a word set of total weight `2^exponent` at depth `length`.
///
/// On success the new code is prefix-free, its profile agrees with the old
/// one below `length`, and gains exactly `2^exponent` at `length`.
///
/// Cases, tried in order:
/// 1. `exponent = 0`: add `b^length`.
/// 2. every free length-`length` word has at most `exponent` letters `a`:
///    exact subset sum over their weights.
/// 3. find a free word at some level `m` whose `a`-count lies in the
///    admissible window and pad it; if none exists, shift vacancies at one
///    level (two words with `j-1` letters `a` become one with `j`) until one
///    does.
/// 4. otherwise an exact subset sum over just the free words with at most
///    `exponent` letters `a`, if they weigh at least `2^exponent`.
/// 5. otherwise fall back to the complete search.
pub fn add_word_step(
    code: &BTreeSet<Word>,
    exponent: usize,
    length: usize,
) -> Result<(BTreeSet<Word>, StepTrace), ConstructError> {
    check_partial_code(code, length)?;
    if exponent > length {
        return Err(ConstructError::ExponentTooLarge { exponent, length });
    }
    let free = available_words(code, length)?;
    let free_weight: Natural = free.iter().map(|w| Natural::pow2(w.count_a())).sum();
    let needed = Natural::pow2(exponent);
    if free_weight < needed {
        return Err(ConstructError::Infeasible { available: free_weight, needed, length });
    }

    let mut trace = StepTrace::new(length, exponent);
    let mut words = code.clone();

    if exponent == 0 {
        let all_b = Word::repeat(Symbol::B, length);
        if free.contains(&all_b) {
            words.insert(all_b.clone());
            trace.actions.push(StepAction::OnlyB { added: all_b });
        } else {
            fallback(&mut words, &mut trace, "b^M is not free".into())?;
        }
    } else if free.iter().all(|w| w.count_a() <= exponent) {
        let (selection, added) = exact_subset(&free, exponent)?;
        words.extend(added.iter().cloned());
        trace.actions.push(StepAction::SubsetSum { selection, added });
    } else {
        guided_insert(&mut words, &mut trace, exponent, length)?;
    }

    verify_step(code, &words, exponent, length, &trace)?;
    Ok((words, trace))
}

/// Exact subset sum over the classes of `free`, realized by the first
/// free words of each chosen class.
fn exact_subset(
    free: &BTreeSet<Word>,
    exponent: usize,
) -> Result<(ExponentMultiset, Vec<Word>), ConstructError> {
    let classes = ExponentMultiset::new(free.iter().map(|w| w.count_a() as u32));
    let selection = subset_sum_exact(&classes, exponent as u32)?;
    let mut pool = free.clone();
    let mut added = Vec::with_capacity(selection.len());
    for &n in selection.as_slice() {
        let pick = pool
            .iter()
            .find(|w| w.count_a() == n as usize)
            .cloned()
            .expect("selection is drawn from the free words");
        pool.remove(&pick);
        added.push(pick);
    }
    Ok((selection, added))
}

/// Low subset sum if the light free words suffice, else the complete search.
fn rescue(
    words: &mut BTreeSet<Word>,
    trace: &mut StepTrace,
    exponent: usize,
    length: usize,
    reason: String,
) -> Result<(), ConstructError> {
    let light: BTreeSet<Word> =
        available_words(words, length)?.into_iter().filter(|w| w.count_a() <= exponent).collect();
    let weight: Natural = light.iter().map(|w| Natural::pow2(w.count_a())).sum();
    if weight < Natural::pow2(exponent) {
        return fallback(words, trace, reason);
    }
    let (selection, added) = exact_subset(&light, exponent)?;
    words.extend(added.iter().cloned());
    trace.actions.push(StepAction::LowSubsetSum { selection, added });
    Ok(())
}

fn guided_insert(
    words: &mut BTreeSet<Word>,
    trace: &mut StepTrace,
    exponent: usize,
    length: usize,
) -> Result<(), ConstructError> {
    if let Some(action) = pad_missing_word(words, exponent, length) {
        words.extend(action.added().into_iter().cloned());
        trace.actions.push(action);
        return Ok(());
    }
    let Some((level, top)) = plan_shift(words, exponent, length) else {
        let reason = "no free word in the admissible window and no vacancy shift".into();
        return rescue(words, trace, exponent, length, reason);
    };
    // Walk the vacancy from `top` down into the window, one class at a time.
    let (_, hi) = admissible_window(level, exponent, length).expect("planned level has a window");
    for j in (hi + 1..=top).rev() {
        let mut below: Vec<Word> =
            words.iter().filter(|w| w.len() == level && w.count_a() == j - 1).cloned().collect();
        let second = below.pop().expect("planned shift has two words");
        let first = below.pop().expect("planned shift has two words");
        words.remove(&first);
        words.remove(&second);
        let Some(added) = least_free_word(words, level, j) else {
            words.insert(first);
            words.insert(second);
            let reason = format!("vacancy shift at level {level} found no free slot");
            return rescue(words, trace, exponent, length, reason);
        };
        words.insert(added.clone());
        trace.actions.push(StepAction::VacancyShift { level, a_count: j, deleted: [first, second], added });
    }
    match pad_missing_word(words, exponent, length) {
        Some(action) => {
            words.extend(action.added().into_iter().cloned());
            trace.actions.push(action);
            Ok(())
        }
        None => rescue(words, trace, exponent, length, "vacancy shifting did not open the window".into()),
    }
}

/// Levels are the code's lengths plus `length` itself.
fn candidate_levels(words: &BTreeSet<Word>, length: usize) -> BTreeSet<usize> {
    let mut levels: BTreeSet<usize> = words.iter().map(Word::len).collect();
    levels.insert(length);
    levels
}

fn pad_missing_word(words: &BTreeSet<Word>, exponent: usize, length: usize) -> Option<StepAction> {
    let occupancy = OccupancyTable::of_words(words);
    for m in candidate_levels(words, length) {
        let Some((lo, hi)) = admissible_window(m, exponent, length) else { continue };
        for j in lo..=hi {
            if !occupancy.has_vacancy(m, j) {
                continue;
            }
            if let Some(missing) = least_free_word(words, m, j) {
                let pad_a = exponent - j;
                let mut added = missing.clone();
                added = added.concat(&Word::repeat(Symbol::A, pad_a));
                added = added.concat(&Word::repeat(Symbol::B, length - m - pad_a));
                return Some(StepAction::MissingWord { level: m, a_count: j, missing, added });
            }
        }
    }
    None
}

/// Picks a level `m` and a class `top` above the window such that class
/// `top` has a free slot and every class from the window's top to `top - 1`
/// holds at least two words, minimizing the number of shifts.
fn plan_shift(words: &BTreeSet<Word>, exponent: usize, length: usize) -> Option<(usize, usize)> {
    let occupancy = OccupancyTable::of_words(words);
    let mut best: Option<(usize, usize, usize)> = None;
    for m in candidate_levels(words, length) {
        let Some((_, hi)) = admissible_window(m, exponent, length) else { continue };
        for top in hi + 1..=m {
            if occupancy.get(m, top - 1) < 2 {
                break;
            }
            if least_free_word(words, m, top).is_some() {
                if best.is_none_or(|(steps, _, _)| top - hi < steps) {
                    best = Some((top - hi, m, top));
                }
                break;
            }
        }
    }
    best.map(|(_, m, top)| (m, top))
}

fn fallback(words: &mut BTreeSet<Word>, trace: &mut StepTrace, reason: String) -> Result<(), ConstructError> {
    let mut target: LengthProfile<Natural> = LengthProfile::of_words(words.iter());
    target.add(trace.length, Natural::pow2(trace.exponent));
    let lengths = target.lengths();
    let Some(solution) = prefixify_oracle(&target, &lengths)? else {
        return Err(ConstructError::StepFailed {
            reason: format!("{reason}; complete search found no solution"),
            trace: Box::new(trace.clone()),
        });
    };
    let solution = solution.into_words();
    let removed: Vec<Word> = words.difference(&solution).cloned().collect();
    let added: Vec<Word> = solution.difference(words).cloned().collect();
    *words = solution;
    trace.actions.push(StepAction::OracleFallback { reason, removed, added });
    Ok(())
}

fn verify_step(
    before: &BTreeSet<Word>,
    after: &BTreeSet<Word>,
    exponent: usize,
    length: usize,
    trace: &StepTrace,
) -> Result<(), ConstructError> {
    let fail = |reason: &str| ConstructError::StepFailed {
        reason: reason.to_string(),
        trace: Box::new(trace.clone()),
    };
    if !is_prefix_free(after) {
        return Err(fail("result is not prefix-free"));
    }
    if trace.replay(before) != *after {
        return Err(fail("trace does not replay to the result"));
    }
    let mut expected: LengthProfile<Natural> = LengthProfile::of_words(before);
    expected.add(length, BigUint::pow2(exponent));
    if LengthProfile::of_words(after) != expected {
        return Err(fail("profile changed outside the added weight"));
    }
    Ok(())
}
