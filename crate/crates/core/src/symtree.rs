//! Rooted trees with at most three children per vertex, stored as
//! prefix-closed sets of child-index words.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::available_words;
use crate::correspondence::{tree_to_code, CorrespondenceError};
use crate::scalar::Count;
use crate::word::Word;
use crate::Natural;

/// Path of child indices from the root; the root is the empty path.
pub type Vertex = Vec<u8>;

pub const MAX_CHILDREN: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("a tree must contain its root")]
    MissingRoot,
    #[error("vertex {} has no parent in the tree", DisplayVertex(.0))]
    NotPrefixClosed(Vertex),
    #[error("vertex {} uses child index {1} (allowed 0..3)", DisplayVertex(.0))]
    ChildIndexOutOfRange(Vertex, u8),
    #[error("children of vertex {} are not an initial segment of 0, 1, 2", DisplayVertex(.0))]
    ChildIndexGap(Vertex),
    #[error("vertex {} is not in the tree", DisplayVertex(.0))]
    NoSuchVertex(Vertex),
    #[error("leaf at depth {depth} is deeper than the requested depth {max}")]
    LeafTooDeep { depth: usize, max: usize },
    #[error("tree is not symmetric at vertex {}", DisplayVertex(.0))]
    NotSymmetric(Vertex),
    #[error("vertex has {0} children in JSON input (at most 3 allowed)")]
    TooManyChildren(usize),
    #[error("complement check failed: free weight {free} but expected {expected}")]
    ComplementMismatch { free: Natural, expected: Natural },
    #[error(transparent)]
    Correspondence(#[from] Box<CorrespondenceError>),
}

struct DisplayVertex<'a>(&'a [u8]);

impl fmt::Display for DisplayVertex<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for i in self.0 {
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// A finite rooted tree with branching at most three.
///
/// Invariants: contains the root, prefix-closed, and the child indices of
/// every vertex form an initial segment of `{0, 1, 2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    vertices: BTreeSet<Vertex>,
}

impl Tree {
    pub fn single() -> Self {
        Tree { vertices: BTreeSet::from([Vec::new()]) }
    }

    pub fn from_vertices<I: IntoIterator<Item = Vertex>>(vertices: I) -> Result<Self, TreeError> {
        let tree = Tree { vertices: vertices.into_iter().collect() };
        tree.validate()?;
        Ok(tree)
    }

    /// Root whose `i`-th child subtree is `children[i]`.
    pub fn from_children(children: &[Tree]) -> Self {
        assert!(children.len() <= MAX_CHILDREN as usize, "at most three children");
        let mut vertices = BTreeSet::from([Vec::new()]);
        for (i, child) in children.iter().enumerate() {
            for v in &child.vertices {
                let mut path = Vec::with_capacity(v.len() + 1);
                path.push(i as u8);
                path.extend_from_slice(v);
                vertices.insert(path);
            }
        }
        Tree { vertices }
    }

    /// Complete ternary tree of the given depth.
    pub fn full(depth: usize) -> Self {
        let mut vertices = BTreeSet::new();
        let mut level = vec![Vec::new()];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(level.len() * 3);
            for v in &level {
                for i in 0..MAX_CHILDREN {
                    let mut child = v.clone();
                    child.push(i);
                    next.push(child);
                }
            }
            vertices.extend(level);
            level = next;
        }
        vertices.extend(level);
        Tree { vertices }
    }

    /// A path of `len` edges.
    pub fn chain(len: usize) -> Self {
        Tree { vertices: (0..=len).map(|k| vec![0; k]).collect() }
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<(), TreeError> {
        if !self.vertices.contains(&Vec::new()) {
            return Err(TreeError::MissingRoot);
        }
        for v in &self.vertices {
            let Some((&last, parent)) = v.split_last() else { continue };
            if last >= MAX_CHILDREN {
                return Err(TreeError::ChildIndexOutOfRange(v.clone(), last));
            }
            if !self.vertices.contains(parent) {
                return Err(TreeError::NotPrefixClosed(v.clone()));
            }
            if last > 0 {
                let mut sibling = parent.to_vec();
                sibling.push(last - 1);
                if !self.vertices.contains(&sibling) {
                    return Err(TreeError::ChildIndexGap(parent.to_vec()));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// Always false: the root is always present.
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.vertices.contains(v)
    }

    pub fn child_count(&self, v: &[u8]) -> u8 {
        let mut child = v.to_vec();
        child.push(0);
        let mut n = 0;
        while n < MAX_CHILDREN {
            *child.last_mut().unwrap() = n;
            if !self.vertices.contains(&child) {
                break;
            }
            n += 1;
        }
        n
    }

    pub fn children(&self, v: &[u8]) -> impl Iterator<Item = Vertex> + '_ {
        let base = v.to_vec();
        (0..self.child_count(v)).map(move |i| {
            let mut child = base.clone();
            child.push(i);
            child
        })
    }

    pub fn is_leaf(&self, v: &[u8]) -> bool {
        self.child_count(v) == 0
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Vertex> + '_ {
        self.vertices.iter().filter(|v| self.is_leaf(v))
    }

    /// Maximal vertex depth.
    pub fn depth(&self) -> usize {
        self.vertices.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `T_v` re-rooted at `v`.
    pub fn subtree(&self, v: &[u8]) -> Result<Tree, TreeError> {
        if !self.contains(v) {
            return Err(TreeError::NoSuchVertex(v.to_vec()));
        }
        let vertices = self
            .vertices
            .range(v.to_vec()..)
            .take_while(|u| u.starts_with(v))
            .map(|u| u[v.len()..].to_vec())
            .collect();
        Ok(Tree { vertices })
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        self.canonical_forms().remove(&Vec::new()).expect("root present")
    }

    /// Canonical form of every rooted subtree, computed bottom-up.
    pub fn canonical_forms(&self) -> BTreeMap<Vertex, CanonicalForm> {
        let mut order: Vec<&Vertex> = self.vertices.iter().collect();
        order.sort_by_key(|v| std::cmp::Reverse(v.len()));
        let mut forms: BTreeMap<Vertex, CanonicalForm> = BTreeMap::new();
        for v in order {
            let mut kids: Vec<&str> = self.children(v).map(|c| forms[&c].0.as_str()).collect::<Vec<_>>();
            kids.sort_unstable();
            let mut encoding = String::with_capacity(2 + kids.iter().map(|k| k.len()).sum::<usize>());
            encoding.push('(');
            for k in kids {
                encoding.push_str(k);
            }
            encoding.push(')');
            forms.insert(v.clone(), CanonicalForm(encoding));
        }
        forms
    }

    /// First vertex (in path order) with at least two children none of
    /// which share a canonical form, if any.
    pub fn asymmetric_vertex(&self) -> Option<Vertex> {
        let forms = self.canonical_forms();
        self.vertices
            .iter()
            .find(|v| {
                let kids: Vec<&CanonicalForm> = self.children(v).map(|c| &forms[&c]).collect();
                kids.len() >= 2 && !has_equal_pair(&kids)
            })
            .cloned()
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetric_vertex().is_none()
    }

    pub fn leaf_counts(&self) -> LeafCountVector<Natural> {
        self.leaf_counts_in()
    }

    pub fn leaf_counts_in<T: Count>(&self) -> LeafCountVector<T> {
        let mut per_depth: BTreeMap<usize, usize> = BTreeMap::new();
        for leaf in self.leaves() {
            *per_depth.entry(leaf.len()).or_default() += 1;
        }
        LeafCountVector { counts: per_depth.into_iter().map(|(k, n)| (k, T::from_usize(n))).collect() }
    }

    /// Grows every leaf at depth `k` into a complete ternary tree of depth
    /// `depth - k`.
    pub fn extend_to_depth(&self, depth: usize) -> Result<Tree, TreeError> {
        let mut vertices = self.vertices.clone();
        for leaf in self.leaves() {
            if leaf.len() > depth {
                return Err(TreeError::LeafTooDeep { depth: leaf.len(), max: depth });
            }
            for v in Tree::full(depth - leaf.len()).vertices {
                let mut path = leaf.clone();
                path.extend(v);
                vertices.insert(path);
            }
        }
        Ok(Tree { vertices })
    }

    /// Words `w ∈ {a,b}^depth` whose slots in the complete ternary tree of
    /// that depth are untouched by the depth-extension of this tree.
    ///
    /// Works on the binary side: the tree's code is recovered and length-
    /// `depth` words with no code word as prefix are collected. The result
    /// is checked against `Σ 2^[w]_a = 3^depth - |L_depth(Ex_depth(T))|`.
    pub fn complement_leaves(&self, depth: usize) -> Result<BTreeSet<Word>, TreeError> {
        if let Some(deep) = self.leaves().map(Vec::len).find(|&k| k > depth) {
            return Err(TreeError::LeafTooDeep { depth: deep, max: depth });
        }
        let free = if self.len() == 1 {
            BTreeSet::new()
        } else {
            let code = tree_to_code(self).map_err(Box::new)?;
            available_words(code.words(), depth)
                .expect("tree codes are prefix-free and no longer than the depth bound")
        };
        let weight: BigUint = free.iter().map(|w| BigUint::pow2(w.count_a())).sum();
        let expected = BigUint::pow3(depth) - self.extended_leaf_count::<BigUint>(depth);
        if weight != expected {
            return Err(TreeError::ComplementMismatch { free: weight, expected });
        }
        Ok(free)
    }

    /// `|L_depth(Ex_depth(T))| = Σ_k |L_k(T)| · 3^(depth - k)` without
    /// materializing the extension. Leaves deeper than `depth` are ignored.
    pub fn extended_leaf_count<T: Count>(&self, depth: usize) -> T {
        self.leaf_counts_in::<T>()
            .iter()
            .filter(|(k, _)| *k <= depth)
            .fold(T::zero(), |acc, (k, n)| acc + n.clone() * T::pow3(depth - k))
    }

    pub fn to_json(&self) -> JsonTree {
        self.to_json_with(&|_| None)
    }

    pub(crate) fn to_json_with(&self, label: &dyn Fn(&[u8]) -> Option<String>) -> JsonTree {
        fn build(t: &Tree, v: &Vertex, label: &dyn Fn(&[u8]) -> Option<String>) -> JsonTree {
            JsonTree { label: label(v), children: t.children(v).map(|c| build(t, &c, label)).collect() }
        }
        build(self, &Vec::new(), label)
    }

    /// Reads the recursive JSON form. Labels are ignored here.
    pub fn from_json(json: &JsonTree) -> Result<Tree, TreeError> {
        fn walk(node: &JsonTree, path: &mut Vertex, out: &mut BTreeSet<Vertex>) -> Result<(), TreeError> {
            if node.children.len() > MAX_CHILDREN as usize {
                return Err(TreeError::TooManyChildren(node.children.len()));
            }
            out.insert(path.clone());
            for (i, child) in node.children.iter().enumerate() {
                path.push(i as u8);
                walk(child, path, out)?;
                path.pop();
            }
            Ok(())
        }
        let mut vertices = BTreeSet::new();
        walk(json, &mut Vec::new(), &mut vertices)?;
        Ok(Tree { vertices })
    }
}

pub(crate) fn has_equal_pair<T: PartialEq>(items: &[T]) -> bool {
    items.iter().enumerate().any(|(i, x)| items[i + 1..].iter().any(|y| x == y))
}

/// Balanced-parenthesis encoding with children sorted, so equal forms mean
/// isomorphic unlabeled rooted trees.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CanonicalForm(String);

impl CanonicalForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Rebuilds a representative tree (children in sorted-form order).
    pub fn to_tree(&self) -> Tree {
        fn parse(bytes: &[u8], pos: &mut usize) -> Tree {
            assert_eq!(bytes[*pos], b'(');
            *pos += 1;
            let mut kids = Vec::new();
            while bytes[*pos] == b'(' {
                kids.push(parse(bytes, pos));
            }
            *pos += 1;
            Tree::from_children(&kids)
        }
        parse(self.0.as_bytes(), &mut 0)
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `k ↦ |L_k(T)|`, listing only depths that hold leaves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeafCountVector<T = BigUint> {
    counts: BTreeMap<usize, T>,
}

impl<T: Count> LeafCountVector<T> {
    pub fn get(&self, depth: usize) -> T {
        self.counts.get(&depth).cloned().unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &T)> + '_ {
        self.counts.iter().map(|(k, v)| (*k, v))
    }

    pub fn depths(&self) -> BTreeSet<usize> {
        self.counts.keys().copied().collect()
    }

    pub fn total(&self) -> T {
        self.counts.values().fold(T::zero(), |acc, v| acc + v.clone())
    }
}

/// Tree JSON: `{"label": "a", "children": [...]}` with `label` optional.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTree {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default)]
    pub children: Vec<JsonTree>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::code;
    use crate::correspondence::code_to_tree;
    use crate::word::w;

    fn counts(entries: &[(usize, u64)]) -> Vec<(usize, BigUint)> {
        entries.iter().map(|&(k, v)| (k, BigUint::from(v))).collect()
    }

    fn leaf_counts(t: &Tree) -> Vec<(usize, BigUint)> {
        t.leaf_counts().iter().map(|(k, v)| (k, v.clone())).collect()
    }

    fn leaves(n: usize) -> Tree {
        Tree::from_children(&vec![Tree::single(); n])
    }

    /// Direct recursive isomorphism test: try every matching of children.
    fn isomorphic(x: &Tree, u: &Vertex, y: &Tree, v: &Vertex) -> bool {
        let xs: Vec<Vertex> = x.children(u).collect();
        let ys: Vec<Vertex> = y.children(v).collect();
        if xs.len() != ys.len() {
            return false;
        }
        fn matches(x: &Tree, xs: &[Vertex], y: &Tree, ys: &mut Vec<Vertex>) -> bool {
            let Some((first, rest)) = xs.split_first() else { return true };
            for i in 0..ys.len() {
                if isomorphic(x, first, y, &ys[i]) {
                    let taken = ys.remove(i);
                    if matches(x, rest, y, ys) {
                        return true;
                    }
                    ys.insert(i, taken);
                }
            }
            false
        }
        matches(x, &xs, y, &mut ys.clone())
    }

    /// Every rooted tree with at most `n` vertices and branching ≤ 3, up to
    /// child order (children listed in nonincreasing canonical form).
    fn small_trees(n: usize) -> Vec<Tree> {
        fn build(size: usize) -> Vec<Tree> {
            if size == 1 {
                return vec![Tree::single()];
            }
            let mut out = Vec::new();
            // Partition size-1 into up to 3 child sizes, each child drawn
            // from trees of that size.
            fn go(remaining: usize, kids: &mut Vec<Tree>, out: &mut Vec<Tree>) {
                if remaining == 0 {
                    out.push(Tree::from_children(kids));
                    return;
                }
                if kids.len() == 3 {
                    return;
                }
                for s in 1..=remaining {
                    for t in build(s) {
                        kids.push(t);
                        go(remaining - s, kids, out);
                        kids.pop();
                    }
                }
            }
            go(size - 1, &mut Vec::new(), &mut out);
            out
        }
        (1..=n).flat_map(build).collect()
    }

    #[test]
    fn subtrees() {
        let t = code_to_tree(&code(&["a", "ba"])).tree().clone();
        assert_eq!(t.subtree(&[]).unwrap(), t);
        assert_eq!(Tree::chain(1).subtree(&[0]).unwrap(), Tree::single());
        assert_eq!(Tree::full(2).subtree(&[0]).unwrap(), Tree::full(1));
        assert_eq!(Tree::full(1).subtree(&[2, 0]), Err(TreeError::NoSuchVertex(vec![2, 0])));
    }

    #[test]
    fn canonical_form_examples() {
        assert_eq!(Tree::single().canonical_form().as_str(), "()");
        assert_eq!(leaves(2).canonical_form().as_str(), "(()())");
        let a = Tree::from_children(&[Tree::chain(1), Tree::single(), leaves(2)]);
        let b = Tree::from_children(&[leaves(2), Tree::chain(1), Tree::single()]);
        assert_eq!(a.canonical_form(), b.canonical_form());
        assert_eq!(
            Tree::from_vertices(a.canonical_form().to_tree().vertices().clone()).unwrap().canonical_form(),
            a.canonical_form()
        );
    }

    #[test]
    fn canonical_forms_decide_isomorphism_on_small_trees() {
        let trees = small_trees(7);
        assert!(trees.len() > 100);
        for x in &trees {
            x.validate().unwrap();
            for y in &trees {
                assert_eq!(
                    x.canonical_form() == y.canonical_form(),
                    isomorphic(x, &Vec::new(), y, &Vec::new()),
                    "{} vs {}",
                    x.canonical_form(),
                    y.canonical_form()
                );
            }
        }
    }

    #[test]
    fn symmetry() {
        assert!(Tree::single().is_symmetric());
        assert!(leaves(2).is_symmetric());
        let lopsided = Tree::from_children(&[Tree::single(), Tree::chain(1)]);
        assert!(!lopsided.is_symmetric());
        assert_eq!(lopsided.asymmetric_vertex(), Some(Vec::new()));
        assert!(Tree::from_children(&[Tree::chain(1), Tree::single(), Tree::single()]).is_symmetric());
        assert!(Tree::full(3).is_symmetric());
    }

    #[test]
    fn leaf_count_examples() {
        assert_eq!(leaf_counts(&Tree::single()), counts(&[(0, 1)]));
        assert_eq!(leaf_counts(&Tree::full(2)), counts(&[(2, 9)]));
        let t = Tree::from_children(&[Tree::single(), Tree::single(), leaves(2)]);
        assert_eq!(leaf_counts(&t), counts(&[(1, 2), (2, 2)]));
        assert_eq!(t.leaf_counts_in::<u32>().total(), 4);
    }

    #[test]
    fn extension() {
        let full = Tree::single().extend_to_depth(2).unwrap();
        assert_eq!(full, Tree::full(2));
        assert_eq!(leaf_counts(&full), counts(&[(2, 9)]));
        assert_eq!(leaf_counts(&Tree::chain(1).extend_to_depth(2).unwrap()), counts(&[(2, 3)]));
        assert_eq!(Tree::full(2).extend_to_depth(2).unwrap(), Tree::full(2));
        assert_eq!(Tree::chain(3).extend_to_depth(2), Err(TreeError::LeafTooDeep { depth: 3, max: 2 }));
    }

    #[test]
    fn extension_preserves_symmetry_and_leaf_formula() {
        for t in small_trees(6).into_iter().filter(Tree::is_symmetric) {
            let m = t.depth() + 1;
            let ex = t.extend_to_depth(m).unwrap();
            ex.validate().unwrap();
            assert!(ex.is_symmetric());
            assert_eq!(ex.leaf_counts().get(m), t.extended_leaf_count::<BigUint>(m));
            assert_eq!(ex.leaf_counts().depths(), BTreeSet::from([m]));
        }
    }

    #[test]
    fn complement_examples() {
        let of = |words: &[&str]| code_to_tree(&code(words)).tree().clone();
        assert_eq!(of(&["b"]).complement_leaves(1).unwrap(), BTreeSet::from([w("a")]));
        assert_eq!(of(&["a"]).complement_leaves(1).unwrap(), BTreeSet::from([w("b")]));
        assert_eq!(of(&["a", "ba"]).complement_leaves(2).unwrap(), BTreeSet::from([w("bb")]));
        assert!(Tree::single().complement_leaves(3).unwrap().is_empty());
        assert!(matches!(
            Tree::from_children(&[Tree::single(), Tree::chain(1)]).complement_leaves(3),
            Err(TreeError::Correspondence(_))
        ));
    }

    #[test]
    fn validation_errors() {
        assert_eq!(Tree::from_vertices(vec![vec![0]]), Err(TreeError::MissingRoot));
        assert_eq!(
            Tree::from_vertices(vec![vec![], vec![0, 0]]),
            Err(TreeError::NotPrefixClosed(vec![0, 0]))
        );
        assert_eq!(Tree::from_vertices(vec![vec![], vec![1]]), Err(TreeError::ChildIndexGap(vec![])));
        assert_eq!(
            Tree::from_vertices(vec![vec![], vec![0], vec![1], vec![2], vec![3]]),
            Err(TreeError::ChildIndexOutOfRange(vec![3], 3))
        );
    }

    #[test]
    fn json_round_trip() {
        let t = Tree::from_children(&[leaves(2), Tree::single()]);
        let text = serde_json::to_string(&t.to_json()).unwrap();
        assert_eq!(text, r#"{"children":[{"children":[{"children":[]},{"children":[]}]},{"children":[]}]}"#);
        let back: JsonTree = serde_json::from_str(&text).unwrap();
        assert_eq!(Tree::from_json(&back).unwrap(), t);
        let four: JsonTree = serde_json::from_str(r#"{"children":[{},{},{},{}]}"#).unwrap();
        assert_eq!(Tree::from_json(&four), Err(TreeError::TooManyChildren(4)));
    }
}
