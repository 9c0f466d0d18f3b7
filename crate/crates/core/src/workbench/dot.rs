//! Graphviz output for trees.

use std::fmt::Write;

use crate::correspondence::LabeledTree;
use crate::symtree::Tree;

/// DOT digraph of an unlabeled tree. Vertex `i_1…i_k` is node `vi_1…i_k`.
pub fn export_dot(tree: &Tree) -> String {
    render(tree, &|_| None)
}

/// DOT digraph with each edge labeled by its letter (`a`, `a-`, `b`).
pub fn export_labeled_dot(tree: &LabeledTree) -> String {
    render(tree.tree(), &|v| tree.label(v).map(|l| l.as_str()))
}

fn node_id(v: &[u8]) -> String {
    let mut id = String::with_capacity(v.len() + 1);
    id.push('v');
    for &i in v {
        id.push(char::from(b'0' + i));
    }
    id
}

fn render(tree: &Tree, label: &dyn Fn(&[u8]) -> Option<&'static str>) -> String {
    let mut out = String::from("digraph tree {\n");
    for v in tree.vertices() {
        writeln!(out, "  {};", node_id(v)).unwrap();
    }
    for v in tree.vertices().iter().filter(|v| !v.is_empty()) {
        let parent = node_id(&v[..v.len() - 1]);
        match label(v) {
            Some(l) => writeln!(out, "  {parent} -> {} [label=\"{l}\"];", node_id(v)).unwrap(),
            None => writeln!(out, "  {parent} -> {};", node_id(v)).unwrap(),
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::code;
    use crate::correspondence::code_to_tree;
    use crate::workbench::enumerate_symmetric_trees;

    fn parse(text: &str) -> dot_parser::canonical::Graph<(&str, &str)> {
        let ast = dot_parser::ast::Graph::try_from(text).expect("valid DOT");
        dot_parser::canonical::Graph::from(ast)
    }

    #[test]
    fn single_vertex() {
        let dot = export_dot(&Tree::single());
        assert_eq!(dot, "digraph tree {\n  v;\n}\n");
        let g = parse(&dot);
        assert_eq!(g.nodes.set.len(), 1);
        assert!(g.edges.set.is_empty());
    }

    #[test]
    fn one_b_child() {
        let dot = export_labeled_dot(&code_to_tree(&code(&["b"])));
        assert_eq!(dot, "digraph tree {\n  v;\n  v0;\n  v -> v0 [label=\"b\"];\n}\n");
        let g = parse(&dot);
        assert_eq!(g.edges.set.len(), 1);
    }

    #[test]
    fn labeled_edges() {
        let dot = export_labeled_dot(&code_to_tree(&code(&["a", "b"])));
        assert!(dot.contains("v -> v0 [label=\"a\"];"));
        assert!(dot.contains("v -> v1 [label=\"a-\"];"));
        assert!(dot.contains("v -> v2 [label=\"b\"];"));
    }

    #[test]
    fn parses_back_to_the_same_shape() {
        for tree in enumerate_symmetric_trees(2) {
            let text = export_dot(&tree);
            let g = parse(&text);
            assert!(g.is_digraph);
            assert_eq!(g.nodes.set.len(), tree.len());
            let mut edges: Vec<(String, String)> =
                g.edges.set.iter().map(|e| (e.from.clone(), e.to.clone())).collect();
            edges.sort();
            let mut expected: Vec<(String, String)> = tree
                .vertices()
                .iter()
                .filter(|v| !v.is_empty())
                .map(|v| (node_id(&v[..v.len() - 1]), node_id(v)))
                .collect();
            expected.sort();
            assert_eq!(edges, expected);
        }
    }

    #[test]
    fn labeled_output_parses() {
        for c in [code(&["a", "ba", "bb"]), code(&["aa", "ab", "b"]), code(&["bbb"])] {
            let labeled = code_to_tree(&c);
            let text = export_labeled_dot(&labeled);
            let g = parse(&text);
            assert_eq!(g.edges.set.len(), labeled.tree().len() - 1);
        }
    }
}
