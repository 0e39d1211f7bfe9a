//! Reference networks and structure enumeration.

use crate::graph::{validate_dag, Dag, RawGraph};

/// Edges `(tail, head)` of the 7-node reference DAG.
pub const FIGURE_ONE_EDGES: [(usize, usize); 11] =
    [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (3, 5), (4, 5), (3, 7), (4, 7), (5, 6), (5, 7)];

/// The 7-node reference DAG used throughout the documentation.
pub fn figure_one() -> Dag {
    validate_dag(&RawGraph::numbered(7, &FIGURE_ONE_EDGES)).expect("reference network is acyclic")
}

/// Directed path `1 -> 2 -> ... -> n`.
pub fn path(n: usize) -> Dag {
    let entries: Vec<_> = (2..=n).map(|l| (l, l - 1)).collect();
    Dag::from_lower_pattern(n, &entries)
}

/// Every `G[l,j]`, `l > j`, nonzero.
pub fn full_dag(n: usize) -> Dag {
    let entries: Vec<_> = (2..=n).flat_map(|l| (1..l).map(move |j| (l, j))).collect();
    Dag::from_lower_pattern(n, &entries)
}

/// All `2^(n(n-1)/2)` strictly lower-triangular sparsity patterns on `n`
/// nodes. Every DAG on `n` nodes is isomorphic to at least one of them.
pub fn all_lower_patterns(n: usize) -> impl Iterator<Item = Dag> {
    let slots: Vec<(usize, usize)> = (2..=n).flat_map(|l| (1..l).map(move |j| (l, j))).collect();
    let count = 1u64 << slots.len();
    (0..count).map(move |mask| {
        let entries: Vec<_> = slots.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e).collect();
        Dag::from_lower_pattern(n, &entries)
    })
}
