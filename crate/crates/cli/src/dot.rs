//! Graphviz rendering. Excited nodes get a double border, measured nodes are
//! filled.

use std::fmt::Write as _;

use empkit_core::{Dag, Emp};

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn to_dot(dag: &Dag, emp: Option<&Emp>) -> String {
    let mut out = String::from("digraph network {\n  rankdir=LR;\n  node [shape=circle];\n");
    for v in 1..=dag.n() {
        let mut attrs = vec![format!("xlabel={}", quoted(&v.to_string()))];
        if let Some(emp) = emp {
            if emp.excited.contains(&v) {
                attrs.push("peripheries=2".to_string());
            }
            if emp.measured.contains(&v) {
                attrs.push("style=filled".to_string());
                attrs.push("fillcolor=lightgray".to_string());
            }
        }
        let _ = writeln!(out, "  {} [{}];", quoted(dag.label(v)), attrs.join(", "));
    }
    for (tail, head) in dag.edges() {
        let _ = writeln!(out, "  {} -> {};", quoted(dag.label(tail)), quoted(dag.label(head)));
    }
    out.push_str("}\n");
    out
}

/// `(tail, head)` label pairs of the edge statements in DOT text produced by
/// [`to_dot`].
pub fn parse_edges(dot: &str) -> Vec<(String, String)> {
    fn unquote(s: &str) -> Option<String> {
        let inner = s.trim().strip_prefix('"')?.strip_suffix('"')?;
        Some(inner.replace("\\\"", "\"").replace("\\\\", "\\"))
    }
    dot.lines()
        .filter_map(|line| {
            let stmt = line.trim().strip_suffix(';')?;
            let (tail, head) = stmt.split_once(" -> ")?;
            Some((unquote(tail)?, unquote(head)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use empkit_core::networks::figure_one;

    #[test]
    fn attributes() {
        let dot = to_dot(&figure_one(), Some(&Emp::new([1, 2, 3, 5], [2, 3, 4, 6, 7])));
        assert!(dot.contains("\"1\" [xlabel=\"1\", peripheries=2];"));
        assert!(dot.contains("\"2\" [xlabel=\"2\", peripheries=2, style=filled, fillcolor=lightgray];"));
        assert!(dot.contains("\"4\" [xlabel=\"4\", style=filled, fillcolor=lightgray];"));
        assert!(dot.contains("\"3\" -> \"7\";"));
    }

    #[test]
    fn plain_topology() {
        let dot = to_dot(&figure_one(), None);
        assert!(!dot.contains("peripheries") && !dot.contains("filled"));
        assert_eq!(parse_edges(&dot).len(), 11);
    }

    #[test]
    fn awkward_labels_survive() {
        let raw = empkit_core::RawGraph {
            nodes: vec!["a \"q\"".into(), "b\\c".into()],
            edges: vec![["a \"q\"".into(), "b\\c".into()]],
        };
        let dag = empkit_core::validate_dag(&raw).unwrap();
        assert_eq!(parse_edges(&to_dot(&dag, None)), vec![("a \"q\"".to_string(), "b\\c".to_string())]);
    }
}
