//! Validity oracles and minimal-EMP enumeration.
//!
//! The Jacobian oracle checks generic local identifiability: the map from
//! edge weights to `M = C T B` has full column rank at random exact points,
//! using `dT/dG[i,j] = T e_i e_j^T T`. The reconstruction oracle hides a
//! random network, reveals only `M`, and runs the saturation engine on the
//! numbers; it certifies constructive recovery.
//!
//! Every trial draws its weights from a ChaCha8 stream seeded by
//! [`derive_seed`], so results depend only on the user seed.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{compute_t, GMatrix, Matrix, TMatrix};
use crate::emp::{check_classified, Emp};
use crate::error::{EmpError, VerifyError};
use crate::graph::Dag;
use crate::synthesis::{saturate, Entry, EquationSystem, KnowledgeState, Scope};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleOptions {
    pub seed: u64,
    pub trials: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { seed: 42, trials: 3 }
    }
}

impl OracleOptions {
    pub fn with_seed(self, seed: u64) -> Self {
        OracleOptions { seed, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMethod {
    JacobianRank,
    Reconstruction,
}

impl OracleMethod {
    pub fn name(self) -> &'static str {
        match self {
            OracleMethod::JacobianRank => "jacobian-rank",
            OracleMethod::Reconstruction => "reconstruction",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictDetail {
    Rank { achieved: usize, required: usize },
    Unrecovered { edges: Vec<(usize, usize)> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleVerdict {
    pub valid: bool,
    pub method: OracleMethod,
    pub detail: VerdictDetail,
    pub trials: usize,
    pub seed: u64,
    /// Rounds of trials drawn again after the first round disagreed.
    pub redraws: usize,
}

/// Mixes a stream index into a seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A non-degenerate exact instantiation of `dag`.
pub fn draw_network(dag: &Dag, seed: u64) -> GMatrix<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = GMatrix::random(dag, &mut rng);
        if !g.is_degenerate() {
            return g;
        }
    }
}

fn check_emp(dag: &Dag, emp: &Emp) -> Result<(), VerifyError> {
    emp.check_nodes(dag.n())?;
    if emp.excited.is_empty() || emp.measured.is_empty() {
        return Err(EmpError::EmptySelection.into());
    }
    Ok(())
}

/// Runs `opts.trials` trials; if they disagree, runs one fresh round.
fn agree<T: PartialEq>(
    opts: &OracleOptions,
    method: OracleMethod,
    mut trial: impl FnMut(u64) -> Result<T, VerifyError>,
) -> Result<(T, usize), VerifyError> {
    if opts.trials == 0 {
        return Err(VerifyError::NoTrials);
    }
    for round in 0..2 {
        let base = (round * opts.trials) as u64;
        let mut outcomes =
            (0..opts.trials as u64).map(|t| trial(derive_seed(opts.seed, base + t))).collect::<Result<Vec<T>, _>>()?;
        if outcomes.windows(2).all(|w| w[0] == w[1]) {
            return Ok((outcomes.swap_remove(0), round));
        }
    }
    Err(VerifyError::Disagreement { method: method.name().into(), seed: opts.seed })
}

/// Rank of `d vec(C T B) / d vec(G)` at `t`. Rows are the pairs `(a, b)`
/// with `a` measured, `b` excited and `a > b`; the other pairs are constant.
pub fn jacobian_rank(dag: &Dag, emp: &Emp, t: &TMatrix<Rational>) -> usize {
    let edges: Vec<(usize, usize)> = dag.g_entries().collect();
    let pairs: Vec<(usize, usize)> =
        emp.measured.iter().flat_map(|&a| emp.excited.iter().filter(move |&&b| a > b).map(move |&b| (a, b))).collect();
    let j = Matrix::from_fn(pairs.len(), edges.len(), |r, c| {
        let ((a, b), (i, jj)) = (pairs[r], edges[c]);
        if a >= i && jj >= b {
            t.get(a, i).clone() * t.get(jj, b).clone()
        } else {
            num_traits::Zero::zero()
        }
    });
    j.rank()
}

pub fn jacobian_oracle(dag: &Dag, emp: &Emp, opts: &OracleOptions) -> Result<OracleVerdict, VerifyError> {
    check_emp(dag, emp)?;
    let required = dag.edge_count();
    let (achieved, redraws) = agree(opts, OracleMethod::JacobianRank, |seed| {
        Ok(jacobian_rank(dag, emp, &compute_t(&draw_network(dag, seed))))
    })?;
    Ok(OracleVerdict {
        valid: achieved == required,
        method: OracleMethod::JacobianRank,
        detail: VerdictDetail::Rank { achieved, required },
        trials: opts.trials,
        seed: opts.seed,
        redraws,
    })
}

/// Edges left undetermined after saturating on `M` alone. Recovered values
/// must equal the hidden ones.
pub fn reconstruct(
    system: &EquationSystem,
    emp: &Emp,
    g: &GMatrix<Rational>,
) -> Result<Vec<(usize, usize)>, VerifyError> {
    let t = compute_t(g);
    let m = t.select(emp)?;
    let rows: Vec<usize> = emp.measured.iter().copied().collect();
    let cols: Vec<usize> = emp.excited.iter().copied().collect();
    let mut state = KnowledgeState::structural(system);
    state.reveal(emp, |r, c| {
        let (ri, ci) = (rows.binary_search(&r).unwrap(), cols.binary_search(&c).unwrap());
        m[(ri, ci)].clone()
    });
    saturate(system, &mut state, Scope::All);
    let mut missing = Vec::new();
    for &(l, j) in system.edges() {
        match state.value(Entry::G(l, j)) {
            Some(v) if *v == g.get(l, j) => {}
            Some(_) => return Err(VerifyError::WrongRecovery(l, j)),
            None => missing.push((l, j)),
        }
    }
    missing.sort();
    Ok(missing)
}

pub fn reconstruction_oracle(dag: &Dag, emp: &Emp, opts: &OracleOptions) -> Result<OracleVerdict, VerifyError> {
    check_emp(dag, emp)?;
    let system = EquationSystem::new(dag);
    let (edges, redraws) =
        agree(opts, OracleMethod::Reconstruction, |seed| reconstruct(&system, emp, &draw_network(dag, seed)))?;
    Ok(OracleVerdict {
        valid: edges.is_empty(),
        method: OracleMethod::Reconstruction,
        detail: VerdictDetail::Unrecovered { edges },
        trials: opts.trials,
        seed: opts.seed,
        redraws,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinimalEmps {
    pub cardinality: usize,
    /// Sorted.
    pub emps: Vec<Emp>,
    /// Candidates passed to the Jacobian oracle.
    pub examined: usize,
}

pub const DEFAULT_NODE_LIMIT: usize = 10;

/// Every valid EMP of minimum cardinality.
///
/// Sources and dources are always excited, sinks and dinks always measured,
/// so each node is assigned one of at most three roles. Candidates are
/// visited by increasing number of doubly used nodes, which is increasing
/// cardinality. Each candidate's oracle seed depends only on its position
/// in that order, so the parallel fan-out is reproducible.
pub fn enumerate_minimal(dag: &Dag, node_limit: usize, opts: &OracleOptions) -> Result<MinimalEmps, VerifyError> {
    let n = dag.n();
    if n > node_limit {
        return Err(VerifyError::TooLarge { n, limit: node_limit });
    }
    let class = dag.classify();
    let must_e: BTreeSet<usize> = class.sources.union(&class.dources).copied().collect();
    let must_m: BTreeSet<usize> = class.sinks.union(&class.dinks).copied().collect();
    let both: Vec<usize> = must_e.intersection(&must_m).copied().collect();
    let rest: Vec<usize> = (1..=n).filter(|v| !both.contains(v)).collect();

    let mut index = 0u64;
    let mut examined = 0;
    for doubled in both.len()..=n {
        let mut level = Vec::new();
        for chosen in combinations(&rest, doubled - both.len()) {
            let single: Vec<usize> = rest.iter().copied().filter(|v| !chosen.contains(v)).collect();
            let free: Vec<usize> =
                single.iter().copied().filter(|v| !must_e.contains(v) && !must_m.contains(v)).collect();
            for mask in 0..1u64 << free.len() {
                let mut excited: BTreeSet<usize> = both.iter().chain(&chosen).copied().collect();
                let mut measured = excited.clone();
                for &v in &single {
                    let to_m = match free.iter().position(|&f| f == v) {
                        Some(k) => mask >> k & 1 == 1,
                        None => must_m.contains(&v),
                    };
                    if to_m {
                        measured.insert(v);
                    } else {
                        excited.insert(v);
                    }
                }
                level.push((index, Emp { excited, measured }));
                index += 1;
            }
        }
        let survivors: Vec<(u64, Emp)> = level
            .into_iter()
            .filter(|(_, emp)| {
                !emp.excited.is_empty() && !emp.measured.is_empty() && check_classified(n, &class, emp).passed()
            })
            .collect();
        examined += survivors.len();
        let verdicts = survivors
            .par_iter()
            .map(|(k, emp)| jacobian_oracle(dag, emp, &opts.with_seed(derive_seed(opts.seed, *k))).map(|v| v.valid))
            .collect::<Result<Vec<bool>, _>>()?;
        let mut emps: Vec<Emp> =
            survivors.into_iter().zip(verdicts).filter(|(_, ok)| *ok).map(|((_, e), _)| e).collect();
        if !emps.is_empty() {
            emps.sort();
            return Ok(MinimalEmps { cardinality: n + doubled, emps, examined });
        }
    }
    unreachable!("exciting and measuring every node is always valid")
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= items.len() {
        go(items, k, 0, &mut Vec::new(), &mut out);
    }
    out
}
