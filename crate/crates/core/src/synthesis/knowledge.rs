//! Knowledge saturation.
//!
//! For every pair `l > j` with a path `j -> l`, the identity `T (I - G) = I`
//! gives
//!
//! ```text
//! X[l,j] = T[l,j] - sum_{i in out(j), j < i < l} T[l,i] G[i,j]
//! ```
//!
//! with `X[l,j] = G[l,j]` on an edge and `X[l,j] = 0` on a structural zero
//! (the `S[l,j] = 0` relation). The engine holds the value of every `T` and
//! `G` entry that has been determined and closes the set under three moves:
//! solving an equation that has a single unknown entering linearly, solving
//! the linear system formed by all currently linear equations in scope, and
//! settling a direct edge (`G[l,j] = T[l,j]`) as soon as its `T` entry is
//! derived. Values are carried exactly, so a coefficient is treated as
//! nonzero only if it is nonzero at the instantiation in use.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::algebra::Matrix;
use crate::emp::Emp;
use crate::graph::Dag;
use crate::scalar::Scalar;

/// An entry of `T` or of `G`, 1-based `(row, col)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Entry {
    T(usize, usize),
    G(usize, usize),
}

/// How an entry became known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "equations")]
pub enum Origin {
    /// Revealed by an excited/measured pair.
    Measured,
    /// Solved from the single equation indexed `(l, j)`.
    Equation((usize, usize)),
    /// Solved jointly from the listed equations.
    System(Vec<(usize, usize)>),
    /// A direct edge settled by its derived `T` entry.
    Direct,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub entry: Entry,
    pub origin: Origin,
}

/// Which equations a saturation run may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    All,
    /// Equations `(l, j)` for a fixed column `j`.
    Column(usize),
    /// Equations `(l, j)` for a fixed row `l`.
    Row(usize),
}

impl Scope {
    fn admits(self, (l, j): (usize, usize)) -> bool {
        match self {
            Scope::All => true,
            Scope::Column(c) => j == c,
            Scope::Row(r) => l == r,
        }
    }
}

/// One instance of the `T (I - G) = I` identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub row: usize,
    pub col: usize,
    pub edge: bool,
    /// Intermediate out-neighbors `i` of `col` contributing `T[row,i] G[i,col]`.
    pub inner: Vec<usize>,
}

impl Equation {
    pub fn index(&self) -> (usize, usize) {
        (self.row, self.col)
    }

    /// Residual terms `(sign, factors)` summing to zero.
    fn terms(&self) -> Vec<(i8, Vec<Entry>)> {
        let (l, j) = (self.row, self.col);
        let mut terms = Vec::with_capacity(self.inner.len() + 2);
        if self.edge {
            terms.push((1, vec![Entry::G(l, j)]));
        }
        terms.push((-1, vec![Entry::T(l, j)]));
        for &i in &self.inner {
            terms.push((1, vec![Entry::T(l, i), Entry::G(i, j)]));
        }
        terms
    }
}

/// The equation family of a DAG, ordered column by column.
#[derive(Debug, Clone)]
pub struct EquationSystem {
    n: usize,
    equations: Vec<Equation>,
    edges: Vec<(usize, usize)>,
    reach: Vec<Vec<bool>>,
}

impl EquationSystem {
    pub fn new(dag: &Dag) -> Self {
        let n = dag.n();
        let mut equations = Vec::new();
        for j in 1..=n {
            for l in j + 1..=n {
                if !dag.reaches(j, l) {
                    continue;
                }
                let inner = dag.out_neighbors(j).iter().copied().filter(|&i| i < l && dag.reaches(i, l)).collect();
                equations.push(Equation { row: l, col: j, edge: dag.is_g_entry(l, j), inner });
            }
        }
        let mut edges: Vec<_> = dag.g_entries().collect();
        edges.sort_by_key(|&(l, j)| (j, l));
        let reach = (1..=n).map(|a| (1..=n).map(|b| dag.reaches(a, b)).collect()).collect();
        EquationSystem { n, equations, edges, reach }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    /// `G` entries in column-major order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn equation(&self, (l, j): (usize, usize)) -> Option<&Equation> {
        self.equations.iter().find(|e| e.row == l && e.col == j)
    }

    /// Edges whose equations fall in `scope`.
    pub fn scope_edges(&self, scope: Scope) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied().filter(move |&e| scope.admits(e))
    }

    /// `T[row, col]` can be nonzero.
    fn t_structural(&self, row: usize, col: usize) -> bool {
        row > col && self.reach[col - 1][row - 1]
    }
}

/// Determined `T` and `G` values, with the EMP that revealed them.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeState<S> {
    n: usize,
    t: Vec<Option<S>>,
    g: BTreeMap<(usize, usize), Option<S>>,
    origins: BTreeMap<Entry, Origin>,
    emp: Emp,
}

impl<S: Scalar> KnowledgeState<S> {
    /// Structural knowledge only: unit diagonal, zero upper triangle, zero
    /// entries between unconnected nodes. Nothing is excited or measured.
    pub fn structural(system: &EquationSystem) -> Self {
        let n = system.n;
        let mut t = vec![None; n * n];
        for r in 1..=n {
            for c in 1..=n {
                if r == c {
                    t[(r - 1) * n + c - 1] = Some(S::one());
                } else if !system.t_structural(r, c) {
                    t[(r - 1) * n + c - 1] = Some(S::zero());
                }
            }
        }
        let g = system.edges.iter().map(|&e| (e, None)).collect();
        KnowledgeState { n, t, g, origins: BTreeMap::new(), emp: Emp::default() }
    }

    /// Adds `extra` to the EMP and reveals `T[c, b]` for every measured `c`
    /// and excited `b`, reading values from `observe(c, b)`. Returns the
    /// newly revealed structurally nonzero entries.
    pub fn reveal(&mut self, extra: &Emp, mut observe: impl FnMut(usize, usize) -> S) -> Vec<Entry> {
        self.emp = self.emp.union(extra);
        let mut fresh = Vec::new();
        for &c in &self.emp.measured {
            for &b in &self.emp.excited {
                let slot = &mut self.t[(c - 1) * self.n + b - 1];
                if slot.is_none() {
                    *slot = Some(observe(c, b));
                    self.origins.insert(Entry::T(c, b), Origin::Measured);
                    fresh.push(Entry::T(c, b));
                }
            }
        }
        fresh.sort();
        fresh
    }

    pub fn emp(&self) -> &Emp {
        &self.emp
    }

    pub fn value(&self, entry: Entry) -> Option<&S> {
        match entry {
            Entry::T(r, c) => self.t[(r - 1) * self.n + c - 1].as_ref(),
            Entry::G(r, c) => self.g.get(&(r, c)).and_then(Option::as_ref),
        }
    }

    pub fn is_known(&self, entry: Entry) -> bool {
        self.value(entry).is_some()
    }

    pub fn origin(&self, entry: Entry) -> Option<&Origin> {
        self.origins.get(&entry)
    }

    /// Determined strictly-lower `T` entries that can be nonzero.
    pub fn known_t(&self) -> BTreeSet<(usize, usize)> {
        self.origins
            .keys()
            .filter_map(|e| match *e {
                Entry::T(r, c) => Some((r, c)),
                Entry::G(..) => None,
            })
            .collect()
    }

    pub fn known_g(&self) -> BTreeSet<(usize, usize)> {
        self.g.iter().filter(|(_, v)| v.is_some()).map(|(&k, _)| k).collect()
    }

    /// Structural-zero equations that still contain unknowns.
    pub fn pending_zero_constraints(&self, system: &EquationSystem) -> Vec<(usize, usize)> {
        system
            .equations
            .iter()
            .filter(|e| !e.edge && e.terms().iter().flat_map(|(_, f)| f).any(|&x| !self.is_known(x)))
            .map(Equation::index)
            .collect()
    }

    pub fn is_resolved(&self, system: &EquationSystem, scope: Scope) -> bool {
        system.scope_edges(scope).all(|(l, j)| self.is_known(Entry::G(l, j)))
    }

    pub fn all_edges_known(&self) -> bool {
        self.g.values().all(Option::is_some)
    }

    fn assign(&mut self, entry: Entry, value: S, origin: Origin) {
        match entry {
            Entry::T(r, c) => self.t[(r - 1) * self.n + c - 1] = Some(value),
            Entry::G(r, c) => {
                self.g.insert((r, c), Some(value));
            }
        }
        self.origins.insert(entry, origin);
    }
}

/// Linear view of an equation: coefficients per unknown and the known part.
struct Linearized<S> {
    index: (usize, usize),
    coeffs: BTreeMap<Entry, S>,
    constant: S,
}

fn linearize<S: Scalar>(eq: &Equation, state: &KnowledgeState<S>) -> Option<Linearized<S>> {
    let mut coeffs: BTreeMap<Entry, S> = BTreeMap::new();
    let mut constant = S::zero();
    for (sign, factors) in eq.terms() {
        let mut known = if sign < 0 { -S::one() } else { S::one() };
        let mut unknown = None;
        for f in factors {
            match state.value(f) {
                Some(v) => known = known * v.clone(),
                None if unknown.is_none() => unknown = Some(f),
                None => return None,
            }
        }
        match unknown {
            Some(u) => {
                let c = coeffs.entry(u).or_insert_with(S::zero);
                *c = c.clone() + known;
            }
            None => constant = constant + known,
        }
    }
    coeffs.retain(|_, c| !c.is_negligible());
    Some(Linearized { index: eq.index(), coeffs, constant })
}

/// Closes `state` under the equations in `scope`; returns what was derived,
/// in derivation order.
pub fn saturate<S: Scalar>(system: &EquationSystem, state: &mut KnowledgeState<S>, scope: Scope) -> Vec<Derivation> {
    let order: Vec<usize> = (0..system.equations.len()).collect();
    saturate_in_order(system, state, scope, &order)
}

/// [`saturate`] visiting equations in the given order. The closure reached
/// does not depend on the order; only the recorded origins may.
pub fn saturate_in_order<S: Scalar>(
    system: &EquationSystem,
    state: &mut KnowledgeState<S>,
    scope: Scope,
    order: &[usize],
) -> Vec<Derivation> {
    let active: Vec<&Equation> =
        order.iter().map(|&k| &system.equations[k]).filter(|e| scope.admits(e.index())).collect();
    let mut log = Vec::new();
    loop {
        let mut progress = false;
        for eq in &active {
            let Some(lin) = linearize(eq, state) else { continue };
            if lin.coeffs.len() == 1 {
                let (&unknown, coeff) = lin.coeffs.iter().next().unwrap();
                let value = -lin.constant / coeff.clone();
                settle(system, state, &mut log, unknown, value, Origin::Equation(lin.index));
                progress = true;
            }
        }
        if progress {
            continue;
        }
        if solve_jointly(system, state, &active, &mut log) {
            continue;
        }
        break;
    }
    log
}

fn settle<S: Scalar>(
    system: &EquationSystem,
    state: &mut KnowledgeState<S>,
    log: &mut Vec<Derivation>,
    entry: Entry,
    value: S,
    origin: Origin,
) {
    state.assign(entry, value.clone(), origin.clone());
    log.push(Derivation { entry, origin });
    if let Entry::T(l, j) = entry {
        let direct = system.equation((l, j)).is_some_and(|e| e.edge && e.inner.is_empty());
        if direct && !state.is_known(Entry::G(l, j)) {
            state.assign(Entry::G(l, j), value, Origin::Direct);
            log.push(Derivation { entry: Entry::G(l, j), origin: Origin::Direct });
        }
    }
}

/// Gathers every equation in scope that is linear in its unknowns and solves
/// for the unknowns the system pins down. Returns `true` on progress.
fn solve_jointly<S: Scalar>(
    system: &EquationSystem,
    state: &mut KnowledgeState<S>,
    active: &[&Equation],
    log: &mut Vec<Derivation>,
) -> bool {
    let rows: Vec<Linearized<S>> =
        active.iter().filter_map(|eq| linearize(eq, state)).filter(|lin| !lin.coeffs.is_empty()).collect();
    if rows.len() < 2 {
        return false;
    }
    let unknowns: Vec<Entry> =
        rows.iter().flat_map(|r| r.coeffs.keys().copied()).collect::<BTreeSet<_>>().into_iter().collect();
    let col_of: BTreeMap<Entry, usize> = unknowns.iter().enumerate().map(|(k, &u)| (u, k)).collect();
    let width = unknowns.len();
    let mut m = Matrix::zeros(rows.len(), width + 1);
    for (r, lin) in rows.iter().enumerate() {
        for (u, c) in &lin.coeffs {
            m[(r, col_of[u])] = c.clone();
        }
        m[(r, width)] = -lin.constant.clone();
    }
    let pivots = m.rref();
    let equations: Vec<(usize, usize)> = rows.iter().map(|r| r.index).collect();
    let mut progress = false;
    for (r, &p) in pivots.iter().enumerate() {
        if p == width {
            break;
        }
        let isolated = (p + 1..width).all(|c| m[(r, c)].is_negligible());
        if isolated && !state.is_known(unknowns[p]) {
            let value = m[(r, width)].clone();
            settle(system, state, log, unknowns[p], value, Origin::System(equations.clone()));
            progress = true;
        }
    }
    progress
}
