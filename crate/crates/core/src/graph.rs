//! Network topology: validation, topological relabeling and structural node
//! classification.
//!
//! Nodes carry user-facing string labels. Internally every node has a dense
//! 1-based index assigned by a deterministic topological sort, so that every
//! edge `i -> j` satisfies `i < j` and the network matrix is strictly lower
//! triangular. An edge `i -> j` is the matrix entry `G[j, i]`.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Graph as it appears on disk: `{"nodes": [...], "edges": [[tail, head], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

impl RawGraph {
    /// Graph on labels `"1"..="n"` with edges given as `(tail, head)` label numbers.
    pub fn numbered(n: usize, edges: &[(usize, usize)]) -> Self {
        RawGraph {
            nodes: (1..=n).map(|i| i.to_string()).collect(),
            edges: edges.iter().map(|&(t, h)| [t.to_string(), h.to_string()]).collect(),
        }
    }
}

/// Sort key giving numeric labels their numeric order, ahead of textual ones.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum LabelKey {
    Number(u64),
    Text,
}

fn label_key(label: &str) -> (LabelKey, String) {
    let key = match label.parse::<u64>() {
        Ok(v) => LabelKey::Number(v),
        Err(_) => LabelKey::Text,
    };
    (key, label.to_owned())
}

/// A validated directed acyclic graph with topologically sorted node indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    labels: Vec<String>,
    edges: BTreeSet<(usize, usize)>,
    in_nbrs: Vec<BTreeSet<usize>>,
    out_nbrs: Vec<BTreeSet<usize>>,
    reach: Vec<Vec<bool>>,
}

/// Validates a raw graph and assigns topological indices.
pub fn validate_dag(raw: &RawGraph) -> Result<Dag, GraphError> {
    if raw.nodes.is_empty() {
        return Err(GraphError::Empty);
    }
    let mut position = HashMap::with_capacity(raw.nodes.len());
    for (i, label) in raw.nodes.iter().enumerate() {
        if position.insert(label.as_str(), i).is_some() {
            return Err(GraphError::DuplicateNode(label.clone()));
        }
    }
    let mut edges = BTreeSet::new();
    for [tail, head] in &raw.edges {
        let t = *position.get(tail.as_str()).ok_or_else(|| GraphError::UnknownNodeLabel(tail.clone()))?;
        let h = *position.get(head.as_str()).ok_or_else(|| GraphError::UnknownNodeLabel(head.clone()))?;
        if t == h {
            return Err(GraphError::SelfLoop(tail.clone()));
        }
        if !edges.insert((t, h)) {
            return Err(GraphError::DuplicateEdge(tail.clone(), head.clone()));
        }
    }
    build_sorted(&raw.nodes, &edges)
}

/// Recomputes the topological labeling of `dag`. The result is identical to
/// the input for any `Dag`, since construction already sorts.
pub fn topological_relabel(dag: &Dag) -> Dag {
    let zero_based: BTreeSet<(usize, usize)> = dag.edges.iter().map(|&(t, h)| (t - 1, h - 1)).collect();
    build_sorted(&dag.labels, &zero_based).expect("a Dag is acyclic")
}

/// Kahn's algorithm; among ready nodes the smallest label goes first.
/// `edges` holds 0-based positions into `labels`.
fn build_sorted(labels: &[String], edges: &BTreeSet<(usize, usize)>) -> Result<Dag, GraphError> {
    let n = labels.len();
    let mut succ = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for &(t, h) in edges {
        succ[t].push(h);
        indeg[h] += 1;
    }
    let mut ready: BinaryHeap<Reverse<((LabelKey, String), usize)>> =
        indeg.iter().enumerate().filter(|(_, &d)| d == 0).map(|(v, _)| Reverse((label_key(&labels[v]), v))).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, v))) = ready.pop() {
        order.push(v);
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.push(Reverse((label_key(&labels[w]), w)));
            }
        }
    }
    if order.len() < n {
        return Err(GraphError::CycleDetected(find_cycle(labels, edges, &indeg)));
    }

    let mut index = vec![0usize; n];
    for (k, &v) in order.iter().enumerate() {
        index[v] = k + 1;
    }
    let sorted_labels = order.iter().map(|&v| labels[v].clone()).collect();
    let sorted_edges = edges.iter().map(|&(t, h)| (index[t], index[h])).collect();
    Ok(Dag::from_sorted(sorted_labels, sorted_edges))
}

/// Extracts one cycle among the nodes Kahn could not release.
fn find_cycle(labels: &[String], edges: &BTreeSet<(usize, usize)>, indeg: &[usize]) -> Vec<String> {
    let stuck: Vec<bool> = indeg.iter().map(|&d| d > 0).collect();
    let pred = |v: usize| {
        edges.iter().find(|&&(t, h)| h == v && stuck[t]).map(|&(t, _)| t).expect("a stuck node has a stuck predecessor")
    };
    let start = stuck.iter().position(|&s| s).expect("some node is stuck");
    let mut seen = vec![None; labels.len()];
    let mut walk = Vec::new();
    let mut v = start;
    while seen[v].is_none() {
        seen[v] = Some(walk.len());
        walk.push(v);
        v = pred(v);
    }
    // walk follows predecessors; reverse it into edge direction and close the loop
    let mut cycle: Vec<usize> = walk[seen[v].unwrap()..].to_vec();
    cycle.reverse();
    cycle.push(cycle[0]);
    cycle.into_iter().map(|v| labels[v].clone()).collect()
}

impl Dag {
    fn from_sorted(labels: Vec<String>, edges: BTreeSet<(usize, usize)>) -> Self {
        let n = labels.len();
        let mut in_nbrs = vec![BTreeSet::new(); n];
        let mut out_nbrs = vec![BTreeSet::new(); n];
        for &(t, h) in &edges {
            debug_assert!(t < h);
            out_nbrs[t - 1].insert(h);
            in_nbrs[h - 1].insert(t);
        }
        let mut reach = vec![vec![false; n]; n];
        for a in (1..=n).rev() {
            reach[a - 1][a - 1] = true;
            for &b in &out_nbrs[a - 1] {
                for c in b..=n {
                    if reach[b - 1][c - 1] {
                        reach[a - 1][c - 1] = true;
                    }
                }
            }
        }
        Dag { labels, edges, in_nbrs, out_nbrs, reach }
    }

    /// Strictly lower-triangular pattern given directly in topological indices:
    /// `entries` lists `(row, col)` pairs with `row > col`, i.e. edges `col -> row`.
    pub fn from_lower_pattern(n: usize, entries: &[(usize, usize)]) -> Self {
        let edges = entries
            .iter()
            .map(|&(l, j)| {
                assert!(l > j && j >= 1 && l <= n, "({l}, {j}) is not strictly lower");
                (j, l)
            })
            .collect();
        Dag::from_sorted((1..=n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index - 1]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label).map(|p| p + 1)
    }

    /// Edges as `(tail, head)` index pairs, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Nonzero network-matrix entries `(row, col)`, ordered column-major as
    /// `G[2,1], G[3,1], ..., G[3,2], ...`.
    pub fn g_entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(t, h)| (h, t))
    }

    pub fn has_edge(&self, tail: usize, head: usize) -> bool {
        self.edges.contains(&(tail, head))
    }

    /// `true` when `G[row, col]` is a structural edge.
    pub fn is_g_entry(&self, row: usize, col: usize) -> bool {
        self.has_edge(col, row)
    }

    pub fn in_neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.in_nbrs[v - 1]
    }

    pub fn out_neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.out_nbrs[v - 1]
    }

    /// Directed path from `from` to `to` (a node reaches itself). `T[to, from]`
    /// is generically nonzero exactly when this holds.
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        self.reach[from - 1][to - 1]
    }

    pub fn classify(&self) -> NodeClassification {
        classify(self)
    }
}

/// Partition of the nodes plus the dource/dink flags. All sets hold indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeClassification {
    pub sources: BTreeSet<usize>,
    pub sinks: BTreeSet<usize>,
    pub internal: BTreeSet<usize>,
    pub dources: BTreeSet<usize>,
    pub dinks: BTreeSet<usize>,
    pub in_neighbors: Vec<BTreeSet<usize>>,
    pub out_neighbors: Vec<BTreeSet<usize>>,
}

impl NodeClassification {
    /// Sources that are also sinks.
    pub fn isolated(&self) -> BTreeSet<usize> {
        self.sources.intersection(&self.sinks).copied().collect()
    }
}

/// Sources, sinks, internal nodes, dources and dinks.
///
/// A node `j` is a dource when some out-neighbor `l` is fed by every
/// in-neighbor of `j`, and a dink when some in-neighbor `k` feeds every
/// out-neighbor of `j`. Both notions are restricted to internal nodes: on a
/// source (sink) the dource (dink) test holds vacuously.
pub fn classify(dag: &Dag) -> NodeClassification {
    let n = dag.n();
    let mut c = NodeClassification {
        sources: BTreeSet::new(),
        sinks: BTreeSet::new(),
        internal: BTreeSet::new(),
        dources: BTreeSet::new(),
        dinks: BTreeSet::new(),
        in_neighbors: dag.in_nbrs.clone(),
        out_neighbors: dag.out_nbrs.clone(),
    };
    for j in 1..=n {
        let ins = dag.in_neighbors(j);
        let outs = dag.out_neighbors(j);
        match (ins.is_empty(), outs.is_empty()) {
            (true, true) => {
                c.sources.insert(j);
                c.sinks.insert(j);
            }
            (true, false) => {
                c.sources.insert(j);
            }
            (false, true) => {
                c.sinks.insert(j);
            }
            (false, false) => {
                c.internal.insert(j);
                if outs.iter().any(|&l| ins.is_subset(dag.in_neighbors(l))) {
                    c.dources.insert(j);
                }
                if ins.iter().any(|&k| outs.is_subset(dag.out_neighbors(k))) {
                    c.dinks.insert(j);
                }
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fig1() -> Dag {
        validate_dag(&RawGraph::numbered(
            7,
            &[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (3, 5), (4, 5), (3, 7), (4, 7), (5, 6), (5, 7)],
        ))
        .unwrap()
    }

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn figure_one_validates_with_identity_labels() {
        let dag = fig1();
        assert_eq!(dag.n(), 7);
        assert_eq!(dag.edge_count(), 11);
        for i in 1..=7 {
            assert_eq!(dag.index_of(&i.to_string()), Some(i));
        }
        let entries: Vec<_> = dag.g_entries().collect();
        let mut expected = vec![(2, 1), (3, 1), (3, 2), (4, 2), (4, 3), (5, 3), (5, 4), (6, 5), (7, 3), (7, 4), (7, 5)];
        expected.sort_by_key(|&(l, j)| (j, l));
        let mut got = entries.clone();
        got.sort_by_key(|&(l, j)| (j, l));
        assert_eq!(got, expected);
    }

    #[test]
    fn single_node() {
        let dag = validate_dag(&RawGraph::numbered(1, &[])).unwrap();
        assert_eq!(dag.n(), 1);
        let c = dag.classify();
        assert_eq!(c.isolated(), set(&[1]));
    }

    #[test]
    fn two_cycle_is_rejected() {
        let err = validate_dag(&RawGraph::numbered(2, &[(1, 2), (2, 1)])).unwrap_err();
        match err {
            GraphError::CycleDetected(cycle) => {
                assert_eq!(cycle.len(), 3);
                assert_eq!(cycle.first(), cycle.last());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn longer_cycle_is_named() {
        let raw = RawGraph::numbered(4, &[(1, 2), (2, 3), (3, 4), (4, 2)]);
        let GraphError::CycleDetected(cycle) = validate_dag(&raw).unwrap_err() else {
            panic!("expected a cycle");
        };
        let members: BTreeSet<_> = cycle.iter().cloned().collect();
        assert_eq!(members, ["2", "3", "4"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn malformed_inputs() {
        assert_eq!(validate_dag(&RawGraph::numbered(0, &[])), Err(GraphError::Empty));
        assert_eq!(validate_dag(&RawGraph::numbered(2, &[(1, 1)])), Err(GraphError::SelfLoop("1".into())));
        assert_eq!(
            validate_dag(&RawGraph::numbered(2, &[(1, 2), (1, 2)])),
            Err(GraphError::DuplicateEdge("1".into(), "2".into()))
        );
        assert_eq!(validate_dag(&RawGraph::numbered(2, &[(1, 3)])), Err(GraphError::UnknownNodeLabel("3".into())));
        let dup = RawGraph { nodes: vec!["a".into(), "a".into()], edges: vec![] };
        assert_eq!(validate_dag(&dup), Err(GraphError::DuplicateNode("a".into())));
    }

    #[test]
    fn reversed_chain_is_relabeled() {
        let dag = validate_dag(&RawGraph::numbered(3, &[(3, 2), (2, 1)])).unwrap();
        assert_eq!(dag.index_of("3"), Some(1));
        assert_eq!(dag.index_of("2"), Some(2));
        assert_eq!(dag.index_of("1"), Some(3));
    }

    #[test]
    fn ready_nodes_are_taken_in_label_order() {
        let raw = RawGraph { nodes: vec!["b".into(), "10".into(), "2".into(), "a".into()], edges: vec![] };
        let dag = validate_dag(&raw).unwrap();
        assert_eq!(dag.labels(), &["2", "10", "a", "b"]);
    }

    #[test]
    fn figure_one_classification() {
        let c = fig1().classify();
        assert_eq!(c.sources, set(&[1]));
        assert_eq!(c.sinks, set(&[6, 7]));
        assert_eq!(c.internal, set(&[2, 3, 4, 5]));
        assert_eq!(c.dources, set(&[2, 5]));
        assert_eq!(c.dinks, set(&[4]));
    }

    #[test]
    fn full_dag_internals_are_dources_and_dinks() {
        let entries: Vec<_> = (1..=5).flat_map(|l| (1..l).map(move |j| (l, j))).collect();
        let c = Dag::from_lower_pattern(5, &entries).classify();
        assert_eq!(c.dources, set(&[2, 3, 4]));
        assert_eq!(c.dinks, set(&[2, 3, 4]));
    }

    #[test]
    fn path_has_no_dources_or_dinks() {
        let c = Dag::from_lower_pattern(3, &[(2, 1), (3, 2)]).classify();
        assert_eq!(c.sources, set(&[1]));
        assert_eq!(c.sinks, set(&[3]));
        assert!(c.dources.is_empty());
        assert!(c.dinks.is_empty());
    }

    #[test]
    fn reachability() {
        let dag = fig1();
        assert!(dag.reaches(1, 7));
        assert!(dag.reaches(2, 6));
        assert!(!dag.reaches(6, 7));
        assert!(!dag.reaches(7, 1));
        assert!(dag.reaches(4, 4));
    }
}
