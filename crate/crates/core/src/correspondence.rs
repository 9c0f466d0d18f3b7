//! The bijection between binary prefix-free codes and symmetric trees.
//!
//! Going from a code to a tree, every `a` in the code's binary prefix tree
//! fans out into two sibling branches labeled `a` and `a⁻¹`, and every `b`
//! into a single `b` branch. Going back, a symmetric tree is labeled
//! top-down (an isomorphic pair of children becomes `a`/`a⁻¹`, a lone or
//! leftover child becomes `b`) and the leaf labels are projected to `{a,b}`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::code::{Code, CodeError};
use crate::symtree::{CanonicalForm, JsonTree, Tree, Vertex};
use crate::word::{Symbol, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorrespondenceError {
    #[error("code is not prefix-free: {0} is a prefix of {1}")]
    NotPrefixFree(Word, Word),
    #[error("tree is not symmetric at vertex {0:?}")]
    NotSymmetric(Vertex),
    #[error("the single-vertex tree corresponds to no nonempty code")]
    SingleVertex,
    #[error("invalid labeling at vertex {0:?}")]
    InvalidLabels(Vertex),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// Edge label of the lifted tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TernarySymbol {
    A,
    AInv,
    B,
}

impl TernarySymbol {
    pub fn project(self) -> Symbol {
        match self {
            TernarySymbol::A | TernarySymbol::AInv => Symbol::A,
            TernarySymbol::B => Symbol::B,
        }
    }

    /// Serialized form: `a`, `a-`, `b`.
    pub fn as_str(self) -> &'static str {
        match self {
            TernarySymbol::A => "a",
            TernarySymbol::AInv => "a-",
            TernarySymbol::B => "b",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "a" => Some(TernarySymbol::A),
            "a-" => Some(TernarySymbol::AInv),
            "b" => Some(TernarySymbol::B),
            _ => None,
        }
    }
}

impl fmt::Display for TernarySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Symbol-wise projection `a, a⁻¹ ↦ a`, `b ↦ b`.
pub fn project(word: &[TernarySymbol]) -> Word {
    word.iter().map(|s| s.project()).collect()
}

/// A tree with a ternary label on each non-root vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTree {
    tree: Tree,
    labels: BTreeMap<Vertex, TernarySymbol>,
}

impl LabeledTree {
    /// Checks that sibling labels are distinct, `a` and `a⁻¹` come together,
    /// and every non-root vertex is labeled.
    pub fn new(tree: Tree, labels: BTreeMap<Vertex, TernarySymbol>) -> Result<Self, CorrespondenceError> {
        for v in tree.vertices() {
            let kids: Vec<TernarySymbol> = tree
                .children(v)
                .map(|c| labels.get(&c).copied().ok_or(CorrespondenceError::InvalidLabels(c)))
                .collect::<Result<_, _>>()?;
            let distinct: BTreeSet<_> = kids.iter().copied().collect();
            let has = |s| distinct.contains(&s);
            if distinct.len() != kids.len() || has(TernarySymbol::A) != has(TernarySymbol::AInv) {
                return Err(CorrespondenceError::InvalidLabels(v.clone()));
            }
        }
        if labels.len() + 1 != tree.len() {
            return Err(CorrespondenceError::InvalidLabels(Vec::new()));
        }
        Ok(LabeledTree { tree, labels })
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn into_tree(self) -> Tree {
        self.tree
    }

    pub fn label(&self, v: &[u8]) -> Option<TernarySymbol> {
        self.labels.get(v).copied()
    }

    /// Labels along the path from the root to `v`.
    pub fn ternary_word(&self, v: &[u8]) -> Vec<TernarySymbol> {
        (1..=v.len()).map(|k| self.labels[&v[..k]]).collect()
    }

    /// Projected leaf labels, i.e. the code this tree stands for.
    pub fn projected_leaves(&self) -> BTreeSet<Word> {
        self.tree.leaves().map(|leaf| project(&self.ternary_word(leaf))).collect()
    }

    pub fn to_json(&self) -> JsonTree {
        self.tree.to_json_with(&|v| self.labels.get(v).map(|s| s.as_str().to_string()))
    }
}

/// Per-prefix summary of a code's binary trie.
#[derive(Default, Clone, Copy)]
struct TrieNode {
    next_a: bool,
    next_b: bool,
}

/// Lifts a prefix-free code to its symmetric tree.
///
/// Each code word `c` lifts to exactly `2^[c]_a` leaves at depth `|c|`.
pub fn code_to_tree(code: &Code) -> LabeledTree {
    try_code_to_tree(code).expect("code_to_tree requires a prefix-free code")
}

pub fn try_code_to_tree(code: &Code) -> Result<LabeledTree, CorrespondenceError> {
    if let Some((u, v)) = prefix_violation(code) {
        return Err(CorrespondenceError::NotPrefixFree(u, v));
    }

    let mut trie: HashMap<Word, TrieNode> = HashMap::new();
    for word in code.iter() {
        for k in 0..word.len() {
            let node = trie.entry(word.prefix(k)).or_default();
            match word.symbols()[k] {
                Symbol::A => node.next_a = true,
                Symbol::B => node.next_b = true,
            }
        }
    }

    let mut vertices = BTreeSet::new();
    let mut labels = BTreeMap::new();
    let mut stack: Vec<(Vertex, Word)> = vec![(Vec::new(), Word::empty())];
    while let Some((vertex, binary)) = stack.pop() {
        if let Some(node) = trie.get(&binary) {
            let mut fan = Vec::with_capacity(3);
            if node.next_a {
                fan.push((TernarySymbol::A, Symbol::A));
                fan.push((TernarySymbol::AInv, Symbol::A));
            }
            if node.next_b {
                fan.push((TernarySymbol::B, Symbol::B));
            }
            for (i, (label, symbol)) in fan.into_iter().enumerate() {
                let mut child = vertex.clone();
                child.push(i as u8);
                let mut next = binary.clone();
                next.push(symbol);
                labels.insert(child.clone(), label);
                stack.push((child, next));
            }
        }
        vertices.insert(vertex);
    }

    let tree = Tree::from_vertices(vertices).expect("fan-out produces a valid tree");
    Ok(LabeledTree { tree, labels })
}

fn prefix_violation(code: &Code) -> Option<(Word, Word)> {
    let words: Vec<&Word> = code.iter().collect();
    words.windows(2).find(|pair| pair[0].is_prefix_of(pair[1])).map(|pair| (pair[0].clone(), pair[1].clone()))
}

/// Labels a symmetric tree top-down. When all three children are
/// isomorphic, the two lowest child indices take `a`/`a⁻¹`.
pub fn label_tree(tree: &Tree) -> Result<LabeledTree, CorrespondenceError> {
    label_tree_by(tree, &|_, candidates| candidates[0])
}

/// Picks one `(a, a⁻¹)` child pair at a vertex from the candidates.
pub type PairChoice<'a> = dyn Fn(&[u8], &[(u8, u8)]) -> (u8, u8) + 'a;

/// Like [`label_tree`], with `choose` picking the `a`/`a⁻¹` pair at each
/// three-child vertex among the isomorphic candidate pairs (listed in
/// index order, never empty).
pub fn label_tree_by(tree: &Tree, choose: &PairChoice<'_>) -> Result<LabeledTree, CorrespondenceError> {
    if tree.len() == 1 {
        return Err(CorrespondenceError::SingleVertex);
    }
    let forms: BTreeMap<Vertex, CanonicalForm> = tree.canonical_forms();
    let mut labels = BTreeMap::new();
    for v in tree.vertices() {
        let kids: Vec<Vertex> = tree.children(v).collect();
        let child = |i: u8| {
            let mut c = v.clone();
            c.push(i);
            c
        };
        let equal = |i: usize, j: usize| forms[&kids[i]] == forms[&kids[j]];
        match kids.len() {
            0 => {}
            1 => {
                labels.insert(child(0), TernarySymbol::B);
            }
            2 => {
                if !equal(0, 1) {
                    return Err(CorrespondenceError::NotSymmetric(v.clone()));
                }
                labels.insert(child(0), TernarySymbol::A);
                labels.insert(child(1), TernarySymbol::AInv);
            }
            _ => {
                let candidates: Vec<(u8, u8)> = [(0, 1), (0, 2), (1, 2)]
                    .into_iter()
                    .filter(|&(i, j)| equal(i as usize, j as usize))
                    .collect();
                if candidates.is_empty() {
                    return Err(CorrespondenceError::NotSymmetric(v.clone()));
                }
                let (i, j) = choose(v, &candidates);
                debug_assert!(candidates.contains(&(i, j)));
                let rest = 3 - i - j;
                labels.insert(child(i), TernarySymbol::A);
                labels.insert(child(j), TernarySymbol::AInv);
                labels.insert(child(rest), TernarySymbol::B);
            }
        }
    }
    Ok(LabeledTree { tree: tree.clone(), labels })
}

/// Recovers the prefix-free code of a symmetric tree with at least two
/// vertices.
pub fn tree_to_code(tree: &Tree) -> Result<Code, CorrespondenceError> {
    let labeled = label_tree(tree)?;
    Ok(Code::from_set(labeled.projected_leaves())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::code;
    use num_bigint::BigUint;

    fn leaves(n: usize) -> Tree {
        Tree::from_children(&vec![Tree::single(); n])
    }

    #[test]
    fn projection() {
        use TernarySymbol::*;
        assert_eq!(project(&[A, AInv, B]), "aab".parse().unwrap());
        assert_eq!(project(&[]), Word::empty());
        assert_eq!(project(&[B, B]), "bb".parse().unwrap());
    }

    #[test]
    fn lifts() {
        let single_b = code_to_tree(&code(&["b"]));
        assert_eq!(single_b.tree(), &Tree::chain(1));
        assert_eq!(single_b.label(&[0]), Some(TernarySymbol::B));

        let single_a = code_to_tree(&code(&["a"]));
        assert_eq!(single_a.tree(), &leaves(2));
        assert_eq!(single_a.label(&[1]), Some(TernarySymbol::AInv));

        let t = code_to_tree(&code(&["a", "ba"]));
        let expected = Tree::from_children(&[Tree::single(), Tree::single(), leaves(2)]);
        assert_eq!(t.tree(), &expected);
        assert_eq!(t.ternary_word(&[2, 1]), vec![TernarySymbol::B, TernarySymbol::AInv]);
        let counts: Vec<(usize, BigUint)> =
            t.tree().leaf_counts().iter().map(|(k, v)| (k, v.clone())).collect();
        assert_eq!(counts, vec![(1, 2u32.into()), (2, 2u32.into())]);
    }

    #[test]
    fn non_prefix_free_is_rejected() {
        assert_eq!(
            try_code_to_tree(&code(&["a", "ab"])),
            Err(CorrespondenceError::NotPrefixFree("a".parse().unwrap(), "ab".parse().unwrap()))
        );
    }

    #[test]
    fn tree_to_code_examples() {
        assert_eq!(tree_to_code(&leaves(2)).unwrap(), code(&["a"]));
        assert_eq!(tree_to_code(&Tree::chain(2)).unwrap(), code(&["bb"]));
        let c = code(&["a", "ba", "bb"]);
        assert_eq!(tree_to_code(code_to_tree(&c).tree()).unwrap(), c);
    }

    #[test]
    fn tree_to_code_rejects_bad_input() {
        assert_eq!(tree_to_code(&Tree::single()), Err(CorrespondenceError::SingleVertex));
        let lopsided = Tree::from_children(&[Tree::single(), Tree::chain(1)]);
        assert_eq!(tree_to_code(&lopsided), Err(CorrespondenceError::NotSymmetric(vec![])));
        let no_pair = Tree::from_children(&[Tree::single(), Tree::chain(1), leaves(2)]);
        assert_eq!(tree_to_code(&no_pair), Err(CorrespondenceError::NotSymmetric(vec![])));
    }

    #[test]
    fn labels_are_well_formed() {
        let t = code_to_tree(&code(&["aa", "ab", "b"]));
        let rebuilt = LabeledTree::new(t.tree().clone(), t.labels.clone()).unwrap();
        assert_eq!(rebuilt, t);
        let mut bad = t.labels.clone();
        bad.insert(vec![1], TernarySymbol::A);
        assert!(LabeledTree::new(t.tree().clone(), bad).is_err());
        let relabeled = label_tree(t.tree()).unwrap();
        assert_eq!(LabeledTree::new(relabeled.tree.clone(), relabeled.labels.clone()).unwrap(), relabeled);
    }

    #[test]
    fn every_isomorphic_pairing_projects_to_the_same_code() {
        // Vertices with three isomorphic children at several depths.
        let triple = leaves(3);
        let instances = [
            leaves(3),
            Tree::from_children(&[triple.clone(), triple.clone(), triple.clone()]),
            Tree::from_children(&[Tree::chain(1), triple.clone(), triple.clone()]),
            Tree::from_children(&[Tree::full(2), Tree::full(2), Tree::full(2)]),
            code_to_tree(&code(&["aa", "ab", "ba", "bb"])).into_tree(),
        ];
        for t in instances {
            let reference = tree_to_code(&t).unwrap();
            for pick in 0..3 {
                let labeled = label_tree_by(&t, &|_, c: &[(u8, u8)]| c[pick % c.len()]).unwrap();
                assert_eq!(Code::from_set(labeled.projected_leaves()).unwrap(), reference);
            }
        }
    }

    #[test]
    fn labeled_json_uses_label_strings() {
        let text = serde_json::to_string(&code_to_tree(&code(&["a", "b"])).to_json()).unwrap();
        assert_eq!(
            text,
            r#"{"children":[{"label":"a","children":[]},{"label":"a-","children":[]},{"label":"b","children":[]}]}"#
        );
    }
}
