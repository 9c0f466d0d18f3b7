//! Unique decodability: the Sardinas–Patterson decision procedure and a
//! bounded brute-force oracle that counts factorizations directly.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::code::Code;
use crate::word::{Symbol, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodabilityError {
    #[error("search bound {bound} is below the maximal word length {max_len}")]
    BoundTooSmall { bound: usize, max_len: usize },
}

/// A word with two distinct factorizations into code words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub word: Word,
    pub left: Vec<Word>,
    pub right: Vec<Word>,
}

impl Witness {
    /// Both factorizations use only code words, concatenate to `word`, and
    /// differ.
    pub fn is_valid_for(&self, code: &Code) -> bool {
        let concat = |parts: &[Word]| parts.iter().fold(Word::empty(), |acc, p| acc.concat(p));
        self.left != self.right
            && self.left.iter().chain(&self.right).all(|w| code.contains(w))
            && concat(&self.left) == self.word
            && concat(&self.right) == self.word
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UdVerdict {
    pub decodable: bool,
    pub witness: Option<Witness>,
}

impl UdVerdict {
    fn decodable() -> Self {
        UdVerdict { decodable: true, witness: None }
    }

    fn ambiguous(witness: Witness) -> Self {
        UdVerdict { decodable: false, witness: Some(witness) }
    }
}

/// One dangling suffix together with how it was reached.
struct SuffixNode {
    suffix: Word,
    parent: Option<usize>,
    /// For a root: the longer word of the initial pair. Otherwise the code
    /// word matched against the parent's suffix.
    via: Word,
    /// Only set on roots: the shorter word of the initial pair.
    root_prefix: Option<Word>,
}

/// Decides unique decodability by iterating dangling-suffix sets.
///
/// `S_1` holds the suffixes `u` with `c·u = c'` for code words `c ≠ c'`; the
/// next set matches each suffix against every code word in both directions.
/// Only suffixes never seen before are propagated: the successor of a set is
/// the union of per-suffix successors, so a level with nothing new can
/// produce nothing new, which covers both the "set repeats" and the "set is
/// empty" stopping rules. A code word equal to a dangling suffix means the
/// empty word was reached, and the parent chain is replayed into two
/// factorizations.
pub fn sardinas_patterson(code: &Code) -> UdVerdict {
    let words: Vec<&Word> = code.iter().collect();
    let mut nodes: Vec<SuffixNode> = Vec::new();
    let mut seen: BTreeMap<Word, usize> = BTreeMap::new();

    let mut frontier = Vec::new();
    for &short in &words {
        for &long in &words {
            if short.is_proper_prefix_of(long) {
                let suffix = long.suffix_from(short.len());
                if !seen.contains_key(&suffix) {
                    seen.insert(suffix.clone(), nodes.len());
                    frontier.push(nodes.len());
                    nodes.push(SuffixNode {
                        suffix,
                        parent: None,
                        via: long.clone(),
                        root_prefix: Some(short.clone()),
                    });
                }
            }
        }
    }

    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &idx in &frontier {
            for &word in &words {
                let suffix = &nodes[idx].suffix;
                let dangling = if word == suffix {
                    return UdVerdict::ambiguous(replay(&nodes, idx, word));
                } else if suffix.is_proper_prefix_of(word) {
                    word.suffix_from(suffix.len())
                } else if word.is_proper_prefix_of(suffix) {
                    suffix.suffix_from(word.len())
                } else {
                    continue;
                };
                if !seen.contains_key(&dangling) {
                    seen.insert(dangling.clone(), nodes.len());
                    next.push(nodes.len());
                    nodes.push(SuffixNode {
                        suffix: dangling,
                        parent: Some(idx),
                        via: word.clone(),
                        root_prefix: None,
                    });
                }
            }
        }
        // Canonical processing order keeps witnesses deterministic.
        next.sort_by(|&x, &y| nodes[x].suffix.cmp(&nodes[y].suffix));
        frontier = next;
    }
    UdVerdict::decodable()
}

/// Rebuilds the two factorizations along the parent chain ending at `last`,
/// closed off by `closing == nodes[last].suffix`.
fn replay(nodes: &[SuffixNode], last: usize, closing: &Word) -> Witness {
    let mut chain = vec![last];
    while let Some(parent) = nodes[*chain.last().unwrap()].parent {
        chain.push(parent);
    }
    chain.reverse();

    let root = &nodes[chain[0]];
    // `ahead` spells `behind` followed by the current dangling suffix.
    let mut ahead = vec![root.via.clone()];
    let mut behind = vec![root.root_prefix.clone().expect("root carries its prefix")];
    for pair in chain.windows(2) {
        let (parent, child) = (&nodes[pair[0]], &nodes[pair[1]]);
        behind.push(child.via.clone());
        if parent.suffix.is_proper_prefix_of(&child.via) {
            std::mem::swap(&mut ahead, &mut behind);
        }
    }
    behind.push(closing.clone());

    let word = ahead.iter().fold(Word::empty(), |acc, p| acc.concat(p));
    let (left, right) = if ahead <= behind { (ahead, behind) } else { (behind, ahead) };
    Witness { word, left, right }
}

/// Parse-count state after reading a prefix of length `n`: the last
/// `max_len - 1` symbols and the factorization counts (capped at 2) of the
/// prefixes of length `n, n-1, …, n-max_len+1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct ParseState {
    tail: Vec<Symbol>,
    counts: Vec<u8>,
}

/// Searches every string of length at most `bound` for two factorizations.
///
/// Strings are explored breadth-first by length through a finite
/// parse-count automaton, so the first ambiguous string found is a shortest
/// one. A `decodable` verdict only covers strings up to `bound`.
pub fn brute_force_ud(code: &Code, bound: usize) -> Result<UdVerdict, DecodabilityError> {
    let max_len = code.max_len();
    if bound < max_len {
        return Err(DecodabilityError::BoundTooSmall { bound, max_len });
    }

    let start = ParseState { tail: Vec::new(), counts: initial_counts(max_len) };
    // levels[n] maps each state reachable after n symbols to its predecessor.
    let mut levels: Vec<BTreeMap<ParseState, Option<(ParseState, Symbol)>>> =
        vec![BTreeMap::from([(start, None)])];

    for _ in 0..bound {
        let mut next = BTreeMap::new();
        for state in levels.last().unwrap().keys() {
            for s in Symbol::ALL {
                let (succ, count) = advance(code, state, s, max_len);
                if count >= 2 {
                    let mut text = vec![s];
                    let mut cursor = state.clone();
                    for level in levels.iter().rev() {
                        match &level[&cursor] {
                            Some((prev, sym)) => {
                                text.push(*sym);
                                cursor = prev.clone();
                            }
                            None => break,
                        }
                    }
                    text.reverse();
                    return Ok(UdVerdict::ambiguous(split_twice(code, Word::from_symbols(text))));
                }
                if succ.counts.iter().any(|&c| c > 0) {
                    next.entry(succ).or_insert_with(|| Some((state.clone(), s)));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    Ok(UdVerdict::decodable())
}

fn initial_counts(max_len: usize) -> Vec<u8> {
    let mut counts = vec![0; max_len.max(1)];
    counts[0] = 1;
    counts
}

fn advance(code: &Code, state: &ParseState, s: Symbol, max_len: usize) -> (ParseState, u8) {
    let mut window = state.tail.clone();
    window.push(s);
    let mut count: u8 = 0;
    for w in code.iter() {
        let k = w.len();
        if k <= window.len() && window[window.len() - k..] == *w.symbols() {
            count = (count + state.counts[k - 1]).min(2);
        }
    }
    let mut counts = Vec::with_capacity(state.counts.len());
    counts.push(count);
    counts.extend_from_slice(&state.counts[..state.counts.len() - 1]);
    let keep = max_len.saturating_sub(1);
    let tail = window[window.len().saturating_sub(keep)..].to_vec();
    (ParseState { tail, counts }, count)
}

/// Two distinct factorizations of a word known to have at least two.
fn split_twice(code: &Code, word: Word) -> Witness {
    let text = word.symbols();
    let mut ways: Vec<Vec<Vec<Word>>> = vec![Vec::new(); text.len() + 1];
    ways[0].push(Vec::new());
    for end in 1..=text.len() {
        for w in code.iter() {
            let k = w.len();
            if k > end || text[end - k..end] != *w.symbols() {
                continue;
            }
            for prior in ways[end - k].clone() {
                if ways[end].len() == 2 {
                    break;
                }
                let mut parts = prior;
                parts.push(w.clone());
                ways[end].push(parts);
            }
        }
    }
    let mut found = std::mem::take(&mut ways[text.len()]);
    assert_eq!(found.len(), 2, "word {word} was reported ambiguous");
    found.sort();
    let right = found.pop().unwrap();
    let left = found.pop().unwrap();
    Witness { word, left, right }
}

/// Search bound that makes [`brute_force_ud`] agree with
/// [`sardinas_patterson`]: (number of distinct nonempty proper suffixes + 1)
/// times the maximal word length.
pub fn agreement_bound(code: &Code) -> usize {
    let suffixes: std::collections::BTreeSet<Word> =
        code.iter().flat_map(|w| (1..w.len()).map(move |i| w.suffix_from(i))).collect();
    (suffixes.len() + 1) * code.max_len()
}
