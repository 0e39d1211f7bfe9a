//! Report model shared by the table and JSON renderers.

use std::fmt::Write as _;

use serde::Serialize;

use empkit_core::emp::{CardinalityBounds, NecessityReport};
use empkit_core::synthesis::SynthesisTrace;
use empkit_core::verify::{MinimalEmps, OracleVerdict, VerdictDetail};
use empkit_core::{Dag, Emp};

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Ok,
    Valid,
    Invalid,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputInfo {
    pub file: String,
    pub sha256: String,
    pub nodes: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeRow {
    pub index: usize,
    pub label: String,
    pub in_neighbors: Vec<String>,
    pub out_neighbors: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassInfo {
    pub sources: Vec<String>,
    pub sinks: Vec<String>,
    pub internal: Vec<String>,
    pub dources: Vec<String>,
    pub dinks: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpInfo {
    pub text: String,
    pub excited: Vec<String>,
    pub measured: Vec<String>,
    pub cardinality: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NecessityInfo {
    pub passed: bool,
    pub coverage_ok: bool,
    pub nonempty_ok: bool,
    pub sources_ok: bool,
    pub sinks_ok: bool,
    pub dources_ok: bool,
    pub dinks_ok: bool,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub stage: String,
    pub added: String,
    pub emp: String,
    pub known_g: String,
    pub known_t: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceInfo {
    pub strategy: String,
    pub stages: Vec<StageRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimalInfo {
    pub cardinality: usize,
    pub examined: usize,
    pub emps: Vec<EmpInfo>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub input: InputInfo,
    pub config: RunConfig,
    pub nodes: Vec<NodeRow>,
    pub classification: ClassInfo,
    pub bounds: CardinalityBounds,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub necessity: Option<NecessityInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceInfo>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<OracleVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimal: Option<MinimalInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emp: Option<EmpInfo>,
    pub outcome: Outcome,
}

/// User label, followed by the topological index when the two differ.
pub fn node_name(dag: &Dag, index: usize) -> String {
    let label = dag.label(index);
    if label == index.to_string() {
        label.to_string()
    } else {
        format!("{label} ({index})")
    }
}

fn names<'a>(dag: &Dag, nodes: impl IntoIterator<Item = &'a usize>) -> Vec<String> {
    nodes.into_iter().map(|&v| node_name(dag, v)).collect()
}

impl Report {
    pub fn new(command: String, input: InputInfo, config: RunConfig, dag: &Dag) -> Self {
        let class = dag.classify();
        let nodes = (1..=dag.n())
            .map(|v| NodeRow {
                index: v,
                label: dag.label(v).to_string(),
                in_neighbors: names(dag, dag.in_neighbors(v)),
                out_neighbors: names(dag, dag.out_neighbors(v)),
            })
            .collect();
        Report {
            command,
            input,
            config,
            nodes,
            classification: ClassInfo {
                sources: names(dag, &class.sources),
                sinks: names(dag, &class.sinks),
                internal: names(dag, &class.internal),
                dources: names(dag, &class.dources),
                dinks: names(dag, &class.dinks),
            },
            bounds: empkit_core::cardinality_bounds(dag),
            necessity: None,
            trace: None,
            verdicts: Vec::new(),
            minimal: None,
            emp: None,
            outcome: Outcome::Ok,
        }
    }
}

pub fn emp_info(dag: &Dag, emp: &Emp) -> EmpInfo {
    EmpInfo {
        text: emp.to_text(dag.n()),
        excited: names(dag, &emp.excited),
        measured: names(dag, &emp.measured),
        cardinality: emp.cardinality(),
    }
}

pub fn necessity_info(dag: &Dag, report: &NecessityReport) -> NecessityInfo {
    NecessityInfo {
        passed: report.passed(),
        coverage_ok: report.coverage_ok,
        nonempty_ok: report.nonempty_ok,
        sources_ok: report.sources_ok,
        sinks_ok: report.sinks_ok,
        dources_ok: report.dources_ok,
        dinks_ok: report.dinks_ok,
        violations: report
            .violations
            .iter()
            .map(|v| match v.node {
                Some(node) => format!("node {}: {}", node_name(dag, node), v.requirement.describe()),
                None => v.requirement.describe().to_string(),
            })
            .collect(),
    }
}

pub fn trace_info(dag: &Dag, trace: &SynthesisTrace) -> TraceInfo {
    TraceInfo {
        strategy: trace.strategy.name().to_string(),
        stages: trace
            .stages
            .iter()
            .map(|s| {
                let [stage, added, emp, known_g, known_t] = s.cells(dag);
                StageRecord { stage, added, emp, known_g, known_t }
            })
            .collect(),
    }
}

pub fn minimal_info(dag: &Dag, found: &MinimalEmps) -> MinimalInfo {
    MinimalInfo {
        cardinality: found.cardinality,
        examined: found.examined,
        emps: found.emps.iter().map(|e| emp_info(dag, e)).collect(),
    }
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(s, &w)| format!("{s:<w$}")).collect();
        out.push_str(cells.join(" | ").trim_end());
        out.push('\n');
    }
    out
}

fn list(items: &[String]) -> String {
    if items.is_empty() {
        "-".to_string()
    } else {
        items.join(" ")
    }
}

fn verdict_line(v: &OracleVerdict) -> String {
    let status = if v.valid { "valid" } else { "invalid" };
    let detail = match &v.detail {
        VerdictDetail::Rank { achieved, required } => format!("rank {achieved} of {required}"),
        VerdictDetail::Unrecovered { edges } if edges.is_empty() => "all edges recovered".to_string(),
        VerdictDetail::Unrecovered { edges } => {
            let e: Vec<String> = edges.iter().map(|(l, j)| format!("G[{l},{j}]")).collect();
            format!("unrecovered {}", e.join(" "))
        }
    };
    let redraw = if v.redraws > 0 { format!(", {} re-draw", v.redraws) } else { String::new() };
    format!("{}: {status} ({detail}; {} trials, seed {}{redraw})", v.method.name(), v.trials, v.seed)
}

/// Plain-text rendering of every field of the report.
pub fn render_table(r: &Report) -> String {
    let mut out = String::new();
    let c = &r.config;
    let _ = writeln!(out, "{}", r.command);
    let _ = writeln!(out, "input: {} (sha256 {})", r.input.file, r.input.sha256);
    let _ = writeln!(out, "network: {} nodes, {} edges", r.input.nodes, r.input.edges);
    let _ = writeln!(
        out,
        "config: seed {}, trials {}, strategy {}, node limit {}",
        c.seed,
        c.trials,
        c.strategy.name(),
        c.node_limit
    );
    out.push('\n');
    let cl = &r.classification;
    let _ = writeln!(
        out,
        "sources: {} | sinks: {} | dources: {} | dinks: {}",
        list(&cl.sources),
        list(&cl.sinks),
        list(&cl.dources),
        list(&cl.dinks)
    );
    let _ = writeln!(out, "internal: {}", list(&cl.internal));
    out.push('\n');
    let mut rows = vec![vec!["node".to_string(), "label".to_string(), "in".to_string(), "out".to_string()]];
    rows.extend(
        r.nodes
            .iter()
            .map(|n| vec![n.index.to_string(), n.label.clone(), list(&n.in_neighbors), list(&n.out_neighbors)]),
    );
    out.push_str(&aligned(&rows));

    if let Some(nec) = &r.necessity {
        out.push('\n');
        let flag = |b: bool| if b { "ok" } else { "FAIL" };
        let _ = writeln!(
            out,
            "necessary conditions: coverage {} | nonempty {} | sources {} | sinks {} | dources {} | dinks {}",
            flag(nec.coverage_ok),
            flag(nec.nonempty_ok),
            flag(nec.sources_ok),
            flag(nec.sinks_ok),
            flag(nec.dources_ok),
            flag(nec.dinks_ok)
        );
        for v in &nec.violations {
            let _ = writeln!(out, "  violation: {v}");
        }
        if !nec.passed && r.verdicts.is_empty() {
            let _ = writeln!(out, "oracles skipped");
        }
    }
    if let Some(trace) = &r.trace {
        out.push('\n');
        let _ = writeln!(out, "trace ({}):", trace.strategy);
        let mut rows = vec![["stage", "added", "EMP", "known G", "known T"].map(String::from).to_vec()];
        rows.extend(
            trace
                .stages
                .iter()
                .map(|s| vec![s.stage.clone(), s.added.clone(), s.emp.clone(), s.known_g.clone(), s.known_t.clone()]),
        );
        out.push_str(&aligned(&rows));
    }
    if !r.verdicts.is_empty() {
        out.push('\n');
        for v in &r.verdicts {
            let _ = writeln!(out, "{}", verdict_line(v));
        }
    }
    if let Some(m) = &r.minimal {
        out.push('\n');
        let _ = writeln!(out, "candidates examined: {}", m.examined);
        let texts: Vec<&str> = m.emps.iter().map(|e| e.text.as_str()).collect();
        let _ = writeln!(out, "ν* = {}: {}", m.cardinality, texts.join("; "));
    }
    let bounds = format!("bounds {}..{}", r.bounds.lower, r.bounds.upper);
    match &r.emp {
        Some(e) => {
            let verdict = match r.outcome {
                Outcome::Valid => " valid",
                Outcome::Invalid => " invalid",
                Outcome::Ok => "",
            };
            let _ = writeln!(out, "\nEMP{verdict}: {} (ν = {}; {bounds})", e.text, e.cardinality);
        }
        None if r.minimal.is_none() => {
            let _ = writeln!(out, "\n{bounds}");
        }
        None => {}
    }
    out
}
