//! Excitation and measurement patterns (EMPs), necessary conditions for
//! validity, and cardinality bounds.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::EmpError;
use crate::graph::{Dag, NodeClassification};

/// Excited node set `B` and measured node set `C`, by topological index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Emp {
    pub excited: BTreeSet<usize>,
    pub measured: BTreeSet<usize>,
}

impl Emp {
    pub fn new(excited: impl IntoIterator<Item = usize>, measured: impl IntoIterator<Item = usize>) -> Self {
        Emp { excited: excited.into_iter().collect(), measured: measured.into_iter().collect() }
    }

    /// `|B| + |C|`.
    pub fn cardinality(&self) -> usize {
        self.excited.len() + self.measured.len()
    }

    pub fn check_nodes(&self, n: usize) -> Result<(), EmpError> {
        match self.excited.iter().chain(&self.measured).find(|&&v| v == 0 || v > n) {
            Some(&v) => Err(EmpError::UnknownNode(v)),
            None => Ok(()),
        }
    }

    /// Componentwise inclusion: every excitation and measurement of `self`
    /// is also present in `other`.
    pub fn is_subpattern_of(&self, other: &Emp) -> bool {
        self.excited.is_subset(&other.excited) && self.measured.is_subset(&other.measured)
    }

    pub fn union(&self, other: &Emp) -> Emp {
        Emp {
            excited: self.excited.union(&other.excited).copied().collect(),
            measured: self.measured.union(&other.measured).copied().collect(),
        }
    }

    /// Compact text: `E125,M23467` on networks with at most 9 nodes,
    /// `E[1,2,5],M[2,3,4,6,7]` otherwise.
    pub fn to_text(&self, n: usize) -> String {
        let part = |set: &BTreeSet<usize>| {
            if n <= 9 {
                set.iter().map(|v| v.to_string()).collect::<String>()
            } else {
                let items: Vec<String> = set.iter().map(|v| v.to_string()).collect();
                format!("[{}]", items.join(","))
            }
        };
        format!("E{},M{}", part(&self.excited), part(&self.measured))
    }

    /// Parses the compact text form for a network with `n` nodes. Digit
    /// lists are accepted only when `n <= 9`; bracketed lists always. The two
    /// parts may be separated by `,` or `/`, in either order.
    pub fn parse(text: &str, n: usize) -> Result<Emp, EmpError> {
        let fail = |reason: &str| EmpError::Parse { text: text.to_owned(), reason: reason.to_owned() };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();

        let mut parts = Vec::new();
        let mut depth = 0usize;
        let mut start = 0;
        for (i, ch) in compact.char_indices() {
            match ch {
                '[' => depth += 1,
                ']' => depth = depth.checked_sub(1).ok_or_else(|| fail("unbalanced `]`"))?,
                ',' | '/' if depth == 0 => {
                    parts.push(&compact[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(fail("unbalanced `[`"));
        }
        parts.push(&compact[start..]);

        let mut excited = None;
        let mut measured = None;
        for part in parts {
            let (slot, body) = match part.chars().next() {
                Some('E') | Some('e') => (&mut excited, &part[1..]),
                Some('M') | Some('m') => (&mut measured, &part[1..]),
                _ => return Err(fail("each part must start with `E` or `M`")),
            };
            if slot.is_some() {
                return Err(fail("repeated `E` or `M` part"));
            }
            *slot = Some(parse_node_list(body, n).map_err(|r| fail(&r))?);
        }
        let emp = Emp {
            excited: excited.ok_or_else(|| fail("missing `E` part"))?,
            measured: measured.ok_or_else(|| fail("missing `M` part"))?,
        };
        emp.check_nodes(n)?;
        Ok(emp)
    }
}

fn parse_node_list(body: &str, n: usize) -> Result<BTreeSet<usize>, String> {
    if let Some(inner) = body.strip_prefix('[') {
        let inner = inner.strip_suffix(']').ok_or("missing `]`")?;
        if inner.is_empty() {
            return Ok(BTreeSet::new());
        }
        inner.split(',').map(|s| s.parse::<usize>().map_err(|_| format!("`{s}` is not a node index"))).collect()
    } else if n <= 9 {
        body.chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| format!("`{c}` is not a digit")))
            .collect()
    } else {
        Err("networks with more than 9 nodes need bracketed index lists".into())
    }
}

/// Condition an EMP failed, attached to the node concerned where there is one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Requirement {
    NonemptyExcitation,
    NonemptyMeasurement,
    /// Every node must be excited or measured.
    Coverage,
    ExciteSource,
    MeasureSink,
    ExciteDource,
    MeasureDink,
}

impl Requirement {
    pub fn describe(self) -> &'static str {
        match self {
            Requirement::NonemptyExcitation => "at least one node must be excited",
            Requirement::NonemptyMeasurement => "at least one node must be measured",
            Requirement::Coverage => "must be excited or measured",
            Requirement::ExciteSource => "must be excited (source)",
            Requirement::MeasureSink => "must be measured (sink)",
            Requirement::ExciteDource => "must be excited (dource)",
            Requirement::MeasureDink => "must be measured (dink)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub node: Option<usize>,
    pub requirement: Requirement,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            Some(v) => write!(f, "node {v}: {}", self.requirement.describe()),
            None => f.write_str(self.requirement.describe()),
        }
    }
}

/// Outcome of the necessary-condition checks. Passing them all does not
/// make an EMP valid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NecessityReport {
    pub coverage_ok: bool,
    pub nonempty_ok: bool,
    pub sources_ok: bool,
    pub sinks_ok: bool,
    pub dources_ok: bool,
    pub dinks_ok: bool,
    pub violations: Vec<Violation>,
}

impl NecessityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_necessary(dag: &Dag, emp: &Emp) -> Result<NecessityReport, EmpError> {
    emp.check_nodes(dag.n())?;
    Ok(check_classified(dag.n(), &dag.classify(), emp))
}

/// [`check_necessary`] against a precomputed classification; node indices
/// are assumed valid.
pub fn check_classified(n: usize, class: &NodeClassification, emp: &Emp) -> NecessityReport {
    let mut violations = Vec::new();
    if emp.excited.is_empty() {
        violations.push(Violation { node: None, requirement: Requirement::NonemptyExcitation });
    }
    if emp.measured.is_empty() {
        violations.push(Violation { node: None, requirement: Requirement::NonemptyMeasurement });
    }
    let nonempty_ok = violations.is_empty();

    let mut flag = |nodes: &BTreeSet<usize>, set: &BTreeSet<usize>, requirement| {
        let before = violations.len();
        for &v in nodes.difference(set) {
            violations.push(Violation { node: Some(v), requirement });
        }
        violations.len() == before
    };
    let all: BTreeSet<usize> = (1..=n).collect();
    let covered = emp.excited.union(&emp.measured).copied().collect();
    let coverage_ok = flag(&all, &covered, Requirement::Coverage);
    let sources_ok = flag(&class.sources, &emp.excited, Requirement::ExciteSource);
    let sinks_ok = flag(&class.sinks, &emp.measured, Requirement::MeasureSink);
    let dources_ok = flag(&class.dources, &emp.excited, Requirement::ExciteDource);
    let dinks_ok = flag(&class.dinks, &emp.measured, Requirement::MeasureDink);

    NecessityReport { coverage_ok, nonempty_ok, sources_ok, sinks_ok, dources_ok, dinks_ok, violations }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CardinalityBounds {
    pub lower: usize,
    pub upper: usize,
}

/// `n <= nu <= 2n - f - s`. An isolated node counts as both a source and a
/// sink yet has to be excited and measured, so each one adds 2 to the upper
/// bound.
pub fn cardinality_bounds(dag: &Dag) -> CardinalityBounds {
    let c = dag.classify();
    let n = dag.n();
    let upper = 2 * n + 2 * c.isolated().len() - c.sources.len() - c.sinks.len();
    CardinalityBounds { lower: n, upper }
}

/// The EMP attaining the upper bound: every node excited except the sinks,
/// every node measured except the sources (isolated nodes get both).
pub fn upper_bound_emp(dag: &Dag) -> Emp {
    let c = dag.classify();
    let iso = c.isolated();
    let excited = (1..=dag.n()).filter(|v| !c.sinks.contains(v) || iso.contains(v));
    let measured = (1..=dag.n()).filter(|v| !c.sources.contains(v) || iso.contains(v));
    Emp::new(excited, measured)
}
