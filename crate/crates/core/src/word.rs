//! Binary words over the alphabet `{a, b}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A letter of the binary alphabet. The derived order `A < B` is used for
/// every tie-break in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    A,
    B,
}

impl Symbol {
    pub const ALL: [Symbol; 2] = [Symbol::A, Symbol::B];

    pub fn as_char(self) -> char {
        match self {
            Symbol::A => 'a',
            Symbol::B => 'b',
        }
    }

    pub fn from_char(c: char) -> Option<Symbol> {
        match c {
            'a' => Some(Symbol::A),
            'b' => Some(Symbol::B),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid character {found:?} at position {position}; words use only 'a' and 'b'")]
pub struct ParseWordError {
    pub found: char,
    pub position: usize,
}

/// A finite word over `{a, b}`. The empty word is a valid value.
///
/// Ordering is lexicographic with a proper prefix sorting before its
/// extensions.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_symbols(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    /// `s^n`.
    pub fn repeat(s: Symbol, n: usize) -> Self {
        Word(vec![s; n])
    }

    /// The word of length `len` whose bits (most significant first) are those
    /// of `index`, with `a = 0` and `b = 1`.
    pub fn from_index(index: u64, len: usize) -> Self {
        Word((0..len).rev().map(|bit| if index >> bit & 1 == 1 { Symbol::B } else { Symbol::A }).collect())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of positions holding `s`.
    pub fn count(&self, s: Symbol) -> usize {
        self.0.iter().filter(|&&x| x == s).count()
    }

    /// `[w]_a`.
    pub fn count_a(&self) -> usize {
        self.count(Symbol::A)
    }

    /// `[w]_b`.
    pub fn count_b(&self) -> usize {
        self.count(Symbol::B)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_proper_prefix_of(&self, other: &Word) -> bool {
        self.len() < other.len() && self.is_prefix_of(other)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        out.extend_from_slice(&other.0);
        Word(out)
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    pub fn pop(&mut self) -> Option<Symbol> {
        self.0.pop()
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    pub fn suffix_from(&self, start: usize) -> Word {
        Word(self.0[start..].to_vec())
    }

    /// If `self = prefix · rest`, returns `rest`.
    pub fn strip_prefix(&self, prefix: &Word) -> Option<Word> {
        self.0.strip_prefix(prefix.0.as_slice()).map(|rest| Word(rest.to_vec()))
    }

    /// All words of length exactly `len`, in lexicographic order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = Word> {
        assert!(len < 64, "word length {len} too large to enumerate");
        (0..1u64 << len).map(move |i| Word::from_index(i, len))
    }

    /// All nonempty words of length at most `max_len`, shortest first and
    /// lexicographic within a length.
    pub fn all_up_to(max_len: usize) -> impl Iterator<Item = Word> {
        (1..=max_len).flat_map(Word::all_of_length)
    }
}

impl FromIterator<Symbol> for Word {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl FromStr for Word {
    type Err = ParseWordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .map(|(position, c)| Symbol::from_char(c).ok_or(ParseWordError { found: c, position }))
            .collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() && f.alternate() {
            return write!(f, "ε");
        }
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand used throughout the tests: `w("aba")`.
#[cfg(test)]
pub(crate) fn w(s: &str) -> Word {
    s.parse().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(w("abba").count(Symbol::A), 2);
        assert_eq!(Word::empty().count(Symbol::A), 0);
        assert_eq!(w("bbb").count(Symbol::A), 0);
        assert_eq!(w("bbb").count_b(), 3);
    }

    #[test]
    fn ordering_is_prefix_first() {
        assert!(w("a") < w("aa"));
        assert!(w("ab") < w("b"));
        assert!(w("ab") < w("abb"));
        assert!(Word::empty() < w("a"));
    }

    #[test]
    fn parse_rejects_other_letters() {
        assert_eq!("abc".parse::<Word>(), Err(ParseWordError { found: 'c', position: 2 }));
        assert_eq!("".parse::<Word>(), Ok(Word::empty()));
    }

    #[test]
    fn index_encoding_is_lexicographic() {
        let words: Vec<_> = Word::all_of_length(3).collect();
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(words, sorted);
        assert_eq!(words[0], w("aaa"));
        assert_eq!(words[5], w("bab"));
        assert_eq!(Word::all_up_to(2).count(), 6);
    }

    #[test]
    fn prefix_helpers() {
        assert!(w("a").is_proper_prefix_of(&w("ab")));
        assert!(!w("ab").is_proper_prefix_of(&w("ab")));
        assert_eq!(w("abba").strip_prefix(&w("ab")), Some(w("ba")));
        assert_eq!(w("abba").strip_prefix(&w("b")), None);
        assert_eq!(format!("{:#}", Word::empty()), "ε");
    }

    proptest::proptest! {
        #[test]
        fn symbol_counts_partition_length(s in "[ab]{0,24}") {
            let word: Word = s.parse().unwrap();
            proptest::prop_assert_eq!(word.count_a() + word.count_b(), word.len());
            proptest::prop_assert_eq!(word.to_string(), s);
        }
    }
}
