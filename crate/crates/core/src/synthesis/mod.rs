//! EMP construction.
//!
//! [`explicit_emp`] reads the excitations and measurements off the chain
//! expansions of every edge. [`synthesize`] runs the stepwise procedure:
//! start from the forced pattern, then visit the columns (or rows) of `S`
//! in turn and, whenever saturation inside the current column leaves an
//! edge undetermined, add the cheapest set of excitations and measurements
//! that resolves it.
//!
//! Synthesis works on one random exact instantiation of the network. The
//! result is then checked by both oracles of [`crate::verify`] with
//! independent draws.

pub mod knowledge;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use knowledge::{saturate, saturate_in_order, Derivation, Entry, EquationSystem, KnowledgeState, Origin, Scope};

use crate::algebra::{chain_expand, compute_t, GMatrix, TMatrix};
use crate::emp::Emp;
use crate::error::SynthesisError;
use crate::graph::Dag;
use crate::verify::{derive_seed, jacobian_oracle, reconstruction_oracle, OracleOptions, OracleVerdict};
use crate::Rational;

/// Traversal order of the stepwise procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Strategy {
    #[serde(rename = "col-ltr")]
    ColumnLtr,
    #[serde(rename = "col-rtl")]
    ColumnRtl,
    #[serde(rename = "row-ttb")]
    RowTtb,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::ColumnLtr, Strategy::ColumnRtl, Strategy::RowTtb];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::ColumnLtr => "col-ltr",
            Strategy::ColumnRtl => "col-rtl",
            Strategy::RowTtb => "row-ttb",
        }
    }

    fn by_rows(self) -> bool {
        self == Strategy::RowTtb
    }

    fn stages(self, system: &EquationSystem) -> Vec<StageLabel> {
        let n = system.n();
        let with_edges = |s: Scope| system.scope_edges(s).next().is_some();
        match self {
            Strategy::ColumnLtr => (1..=n).filter(|&j| with_edges(Scope::Column(j))).map(StageLabel::Column).collect(),
            Strategy::ColumnRtl => {
                (1..=n).rev().filter(|&j| with_edges(Scope::Column(j))).map(StageLabel::Column).collect()
            }
            Strategy::RowTtb => (1..=n).filter(|&l| with_edges(Scope::Row(l))).map(StageLabel::Row).collect(),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown strategy `{s}` (expected col-ltr, col-rtl or row-ttb)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "index")]
pub enum StageLabel {
    Initial,
    Column(usize),
    Row(usize),
}

impl StageLabel {
    fn scope(self) -> Option<Scope> {
        match self {
            StageLabel::Initial => None,
            StageLabel::Column(j) => Some(Scope::Column(j)),
            StageLabel::Row(l) => Some(Scope::Row(l)),
        }
    }
}

impl fmt::Display for StageLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageLabel::Initial => f.write_str("0"),
            StageLabel::Column(j) => write!(f, "col {j}"),
            StageLabel::Row(l) => write!(f, "row {l}"),
        }
    }
}

/// One step of the procedure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub label: StageLabel,
    /// Excitations and measurements introduced at this stage.
    pub added: Emp,
    /// Pattern after this stage.
    pub emp: Emp,
    pub new_g: Vec<Derivation>,
    pub new_t: Vec<Derivation>,
}

impl Stage {
    /// `T` entries worth listing: everything at the initial stage, and
    /// outside the stage's own column (or row) afterwards.
    pub fn listed_t(&self) -> impl Iterator<Item = &Derivation> + '_ {
        self.new_t.iter().filter(move |d| {
            let Entry::T(r, c) = d.entry else { return false };
            match self.label {
                StageLabel::Initial => true,
                StageLabel::Column(j) => c != j,
                StageLabel::Row(l) => r != l,
            }
        })
    }
}

impl Stage {
    /// Stage label, additions, resulting EMP, new `G` entries with the
    /// relations used, listed `T` entries.
    pub fn cells(&self, dag: &Dag) -> [String; 5] {
        let n = dag.n();
        let g: Vec<String> = self.new_g.iter().map(|d| describe_g(d, dag)).collect();
        let t: Vec<String> = self.listed_t().map(|d| entry_text(d.entry, n)).collect();
        [self.label.to_string(), additions_text(&self.added, n), self.emp.to_text(n), g.join(", "), t.join(" ")]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SynthesisTrace {
    pub strategy: Strategy,
    pub seed: u64,
    pub stages: Vec<Stage>,
}

impl SynthesisTrace {
    /// Re-applies the recorded additions on a fresh instantiation drawn from
    /// the same seed.
    pub fn replay(&self, dag: &Dag) -> KnowledgeState<Rational> {
        let system = EquationSystem::new(dag);
        let t = instance(dag, self.seed);
        let mut state = KnowledgeState::structural(&system);
        for stage in &self.stages {
            state.reveal(&stage.added, |r, c| t.get(r, c).clone());
            if let Some(scope) = stage.label.scope() {
                saturate(&system, &mut state, scope);
            }
        }
        state
    }

    pub fn final_emp(&self) -> Emp {
        self.stages.last().map(|s| s.emp.clone()).unwrap_or_default()
    }

    /// Aligned text table with one line per stage.
    pub fn render_table(&self, dag: &Dag) -> String {
        let header = ["stage", "added", "EMP", "known G", "known T"].map(String::from);
        let rows: Vec<[String; 5]> = self.stages.iter().map(|s| s.cells(dag)).collect();
        let mut widths = header.clone().map(|h| h.len());
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        for row in std::iter::once(&header).chain(&rows) {
            let cells: Vec<String> = row.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
            out.push_str(cells.join(" | ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// Only the nonempty halves of an addition, `-` when nothing was added.
pub fn additions_text(added: &Emp, n: usize) -> String {
    let text = added.to_text(n);
    let parts: Vec<&str> = text.split(',').filter(|p| p.len() > 1).collect();
    if parts.is_empty() {
        "-".to_string()
    } else {
        parts.join(",")
    }
}

/// `T53`-style text for small networks, `T[5,3]` beyond nine nodes.
pub fn entry_text(entry: Entry, n: usize) -> String {
    match entry {
        Entry::T(r, c) => pair_text('T', (r, c), n),
        Entry::G(r, c) => pair_text('G', (r, c), n),
    }
}

fn pair_text(sym: char, (r, c): (usize, usize), n: usize) -> String {
    if n <= 9 {
        format!("{sym}{r}{c}")
    } else {
        format!("{sym}[{r},{c}]")
    }
}

/// A `G` derivation, naming the relations used other than its own edge
/// equation: `S` for structural zeros, `G` for other edges.
fn describe_g(d: &Derivation, dag: &Dag) -> String {
    let n = dag.n();
    let own = match d.entry {
        Entry::G(r, c) | Entry::T(r, c) => (r, c),
    };
    let used: Vec<(usize, usize)> = match &d.origin {
        Origin::Equation(e) => vec![*e],
        Origin::System(eqs) => eqs.clone(),
        Origin::Measured | Origin::Direct => Vec::new(),
    };
    let names: Vec<String> = used
        .into_iter()
        .filter(|&e| e != own)
        .map(|e| pair_text(if dag.is_g_entry(e.0, e.1) { 'G' } else { 'S' }, e, n))
        .collect();
    let base = entry_text(d.entry, n);
    if names.is_empty() {
        base
    } else {
        format!("{base} from {}", names.join(","))
    }
}

/// Result of [`synthesize`].
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub emp: Emp,
    pub trace: SynthesisTrace,
    pub state: KnowledgeState<Rational>,
    pub jacobian: OracleVerdict,
    pub reconstruction: OracleVerdict,
}

/// Sources and dources excited, sinks and dinks measured.
pub fn initial_emp(dag: &Dag) -> Emp {
    let class = dag.classify();
    Emp::new(class.sources.iter().chain(&class.dources).copied(), class.sinks.iter().chain(&class.dinks).copied())
}

/// Every node appearing as a column index of some `T` factor in the chain
/// expansion of an edge is excited, every row index measured. Isolated nodes
/// have no expansion and keep their forced excitation and measurement.
pub fn explicit_emp(dag: &Dag) -> Emp {
    let mut excited = BTreeSet::new();
    let mut measured = BTreeSet::new();
    for edge in dag.g_entries() {
        let expansion = chain_expand(dag, edge).expect("edges lie below the diagonal");
        for (r, c) in expansion.t_entries() {
            measured.insert(r);
            excited.insert(c);
        }
    }
    Emp { excited, measured }.union(&initial_emp(dag))
}

fn instance(dag: &Dag, seed: u64) -> TMatrix<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, u64::MAX));
    loop {
        let g: GMatrix<Rational> = GMatrix::random(dag, &mut rng);
        if !g.is_degenerate() {
            return compute_t(&g);
        }
    }
}

/// Runs the stepwise procedure and certifies the outcome with both oracles.
pub fn synthesize(dag: &Dag, strategy: Strategy, opts: &OracleOptions) -> Result<Synthesis, SynthesisError> {
    let (trace, state) = build_trace(dag, strategy, opts.seed)?;
    let emp = trace.final_emp();
    let n = dag.n();
    let jacobian = jacobian_oracle(dag, &emp, opts)?;
    if !jacobian.valid {
        return Err(SynthesisError::Unverified { emp: emp.to_text(n), method: "jacobian-rank".into() });
    }
    let reconstruction = reconstruction_oracle(dag, &emp, opts)?;
    if !reconstruction.valid {
        return Err(SynthesisError::Unverified { emp: emp.to_text(n), method: "reconstruction".into() });
    }
    Ok(Synthesis { emp, trace, state, jacobian, reconstruction })
}

/// The stepwise procedure alone, without oracle certification.
pub fn build_trace(
    dag: &Dag,
    strategy: Strategy,
    seed: u64,
) -> Result<(SynthesisTrace, KnowledgeState<Rational>), SynthesisError> {
    let system = EquationSystem::new(dag);
    let t = instance(dag, seed);
    let observe = |r: usize, c: usize| t.get(r, c).clone();

    let mut state = KnowledgeState::structural(&system);
    let emp0 = initial_emp(dag);
    let revealed = state.reveal(&emp0, observe);
    let mut stages = vec![Stage {
        label: StageLabel::Initial,
        added: emp0.clone(),
        emp: emp0,
        new_g: Vec::new(),
        new_t: revealed.into_iter().map(|entry| Derivation { entry, origin: Origin::Measured }).collect(),
    }];

    for label in strategy.stages(&system) {
        let scope = label.scope().expect("traversal stages carry a scope");
        let mut bare = state.clone();
        let mut log = saturate(&system, &mut bare, scope);
        let (added, next) = if bare.is_resolved(&system, scope) {
            (Emp::default(), bare)
        } else {
            let mut found = None;
            for candidate in candidates(&system, &bare, scope, strategy.by_rows()) {
                let mut trial = state.clone();
                let fresh = trial.reveal(&candidate, observe);
                let derived = saturate(&system, &mut trial, scope);
                if trial.is_resolved(&system, scope) {
                    log = fresh
                        .into_iter()
                        .map(|entry| Derivation { entry, origin: Origin::Measured })
                        .chain(derived)
                        .collect();
                    found = Some((candidate, trial));
                    break;
                }
            }
            found.ok_or_else(|| SynthesisError::SynthesisFailed(label.to_string()))?
        };
        let (new_g, new_t) = log.into_iter().partition(|d| matches!(d.entry, Entry::G(..)));
        stages.push(Stage { label, added, emp: next.emp().clone(), new_g, new_t });
        state = next;
    }
    Ok((SynthesisTrace { strategy, seed, stages }, state))
}

/// Candidate additions for an unresolved scope, cheapest first.
///
/// Measuring a row index or exciting a column index of an undetermined `T`
/// entry in the scope's equations are the only additions that can reveal
/// something new there. Column stages prefer fewer excitations, then fewer
/// measurements; row stages the reverse. Ties break lexicographically.
fn candidates(system: &EquationSystem, state: &KnowledgeState<Rational>, scope: Scope, by_rows: bool) -> Vec<Emp> {
    let emp = state.emp();
    let mut measure_pool = BTreeSet::new();
    let mut excite_pool = BTreeSet::new();
    for eq in system.equations().iter().filter(|e| scope_admits(scope, e.index())) {
        let mut ts = vec![(eq.row, eq.col)];
        ts.extend(eq.inner.iter().map(|&i| (eq.row, i)));
        for (r, c) in ts {
            if !state.is_known(Entry::T(r, c)) {
                if !emp.measured.contains(&r) {
                    measure_pool.insert(r);
                }
                if !emp.excited.contains(&c) {
                    excite_pool.insert(c);
                }
            }
        }
    }
    let measure_sets = subsets(&measure_pool.into_iter().collect::<Vec<_>>());
    let excite_sets = subsets(&excite_pool.into_iter().collect::<Vec<_>>());
    let mut out: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for m in &measure_sets {
        for e in &excite_sets {
            if !(m.is_empty() && e.is_empty()) {
                out.push((e.clone(), m.clone()));
            }
        }
    }
    if by_rows {
        out.sort_by(|(e1, m1), (e2, m2)| (m1.len(), e1.len(), e1, m1).cmp(&(m2.len(), e2.len(), e2, m2)));
    } else {
        out.sort_by(|(e1, m1), (e2, m2)| (e1.len(), m1.len(), m1, e1).cmp(&(e2.len(), m2.len(), m2, e2)));
    }
    out.into_iter().map(|(e, m)| Emp::new(e, m)).collect()
}

fn scope_admits(scope: Scope, (l, j): (usize, usize)) -> bool {
    match scope {
        Scope::All => true,
        Scope::Column(c) => j == c,
        Scope::Row(r) => l == r,
    }
}

fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (0..1u64 << items.len())
        .map(|mask| items.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &v)| v).collect())
        .collect()
}
