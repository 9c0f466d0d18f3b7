//! Exhaustive generators for the small universes the sweeps run over.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::code::Code;
use crate::decodability::sardinas_patterson;
use crate::symtree::{CanonicalForm, Tree};
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeFilter {
    All,
    Decodable,
    PrefixFree,
}

impl CodeFilter {
    pub const ALL: [CodeFilter; 3] = [CodeFilter::All, CodeFilter::Decodable, CodeFilter::PrefixFree];

    pub fn as_str(self) -> &'static str {
        match self {
            CodeFilter::All => "all",
            CodeFilter::Decodable => "decodable",
            CodeFilter::PrefixFree => "prefix_free",
        }
    }

    pub fn accepts(self, code: &Code) -> bool {
        match self {
            CodeFilter::All => true,
            CodeFilter::Decodable => sardinas_patterson(code).decodable,
            CodeFilter::PrefixFree => code.is_prefix_free(),
        }
    }
}

impl fmt::Display for CodeFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown filter {0:?} (expected all, decodable or prefix_free)")]
pub struct UnknownFilter(pub String);

impl FromStr for CodeFilter {
    type Err = UnknownFilter;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CodeFilter::ALL
            .into_iter()
            .find(|f| f.as_str() == s || f.as_str().replace('_', "-") == s)
            .ok_or_else(|| UnknownFilter(s.to_owned()))
    }
}

/// Every nonempty set of at most `max_words` distinct nonempty words of
/// length at most `max_len` that passes `filter`.
///
/// Codes come by cardinality, then as combinations of the shortlex word list.
pub fn enumerate_codes(max_words: usize, max_len: usize, filter: CodeFilter) -> impl Iterator<Item = Code> {
    let pool: Vec<Word> = Word::all_up_to(max_len).collect();
    let most = max_words.min(pool.len());
    (1..=most)
        .flat_map(move |n| pool.clone().into_iter().combinations(n))
        .map(|words| Code::new(words).expect("distinct nonempty words"))
        .filter(move |c| filter.accepts(c))
}

/// One representative per canonical form of every symmetric tree of depth
/// at most `max_depth`, ordered by canonical form.
///
/// A symmetric tree of depth `≤ d` is a root with no children, one child,
/// two isomorphic children, or three children two of which are isomorphic,
/// the children being symmetric of depth `≤ d - 1`.
pub fn enumerate_symmetric_trees(max_depth: usize) -> impl Iterator<Item = Tree> {
    symmetric_forms(max_depth).into_iter().map(|f| f.to_tree())
}

/// The canonical forms behind [`enumerate_symmetric_trees`].
pub fn symmetric_forms(max_depth: usize) -> BTreeSet<CanonicalForm> {
    let mut forms = BTreeSet::from([Tree::single().canonical_form()]);
    for _ in 0..max_depth {
        let below: Vec<Tree> = forms.iter().map(CanonicalForm::to_tree).collect();
        let mut next = BTreeSet::from([Tree::single().canonical_form()]);
        for x in &below {
            next.insert(Tree::from_children(std::slice::from_ref(x)).canonical_form());
            next.insert(Tree::from_children(&[x.clone(), x.clone()]).canonical_form());
            for y in &below {
                next.insert(Tree::from_children(&[x.clone(), x.clone(), y.clone()]).canonical_form());
            }
        }
        forms = next;
    }
    forms
}
