//! Command-line front end: graph ingestion, command dispatch and report
//! rendering. [`run`] is the whole program minus process exit.

pub mod config;
pub mod dot;
pub mod error;
pub mod report;

use sha2::{Digest, Sha256};

use empkit_core::emp::check_necessary;
use empkit_core::synthesis::{explicit_emp, synthesize};
use empkit_core::verify::{enumerate_minimal, jacobian_oracle, reconstruction_oracle, OracleOptions};
use empkit_core::{validate_dag, Dag, Emp, RawGraph};

pub use config::{Cli, Command, OutputFormat, RunConfig, StrategyArg};
pub use error::CliError;
use report::{emp_info, minimal_info, necessity_info, trace_info, InputInfo, Outcome, Report};

/// Text for standard output and the process exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

pub fn load_graph(path: &str) -> Result<(Dag, InputInfo), CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io { path: path.to_string(), source })?;
    let raw: RawGraph = serde_json::from_slice(&bytes).map_err(|e| CliError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let dag = validate_dag(&raw)?;
    let info = InputInfo {
        file: path.to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
        nodes: dag.n(),
        edges: dag.edge_count(),
    };
    Ok((dag, info))
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let (dag, input) = load_graph(&cli.graph)?;
    let emp = cli.emp.as_deref().map(|text| Emp::parse(text, dag.n())).transpose()?;
    if let Some(emp) = &emp {
        emp.check_nodes(dag.n())?;
    }
    if cli.command == Command::ExportDot {
        return Ok(Output { text: dot::to_dot(&dag, emp.as_ref()), code: 0 });
    }

    let opts = OracleOptions { seed: cli.seed, trials: cli.trials };
    let mut report = Report::new(cli.echo(), input, cli.config(), &dag);
    let mut code = 0;
    match cli.command {
        Command::Classify | Command::ExportDot => {}
        Command::Synthesize => {
            let found = match cli.strategy.procedure() {
                Some(strategy) => {
                    let s = synthesize(&dag, strategy, &opts)?;
                    report.trace = Some(trace_info(&dag, &s.trace));
                    report.verdicts = vec![s.jacobian, s.reconstruction];
                    s.emp
                }
                None => {
                    let e = explicit_emp(&dag);
                    let j = jacobian_oracle(&dag, &e, &opts)?;
                    let r = reconstruction_oracle(&dag, &e, &opts)?;
                    if !(j.valid && r.valid) {
                        return Err(CliError::ExplicitRejected(e.to_text(dag.n())));
                    }
                    report.verdicts = vec![j, r];
                    e
                }
            };
            report.necessity = Some(necessity_info(&dag, &check_necessary(&dag, &found)?));
            report.emp = Some(emp_info(&dag, &found));
        }
        Command::Verify => {
            let emp = emp.ok_or(CliError::MissingEmp("verify"))?;
            let necessity = check_necessary(&dag, &emp)?;
            report.necessity = Some(necessity_info(&dag, &necessity));
            // Role violations alone decide; a coverage gap still gets oracle diagnostics.
            let roles_ok = necessity.sources_ok && necessity.sinks_ok && necessity.dources_ok && necessity.dinks_ok;
            let mut valid = false;
            if roles_ok && necessity.nonempty_ok {
                let j = jacobian_oracle(&dag, &emp, &opts)?;
                let r = reconstruction_oracle(&dag, &emp, &opts)?;
                valid = necessity.passed() && j.valid;
                report.verdicts = vec![j, r];
            }
            report.outcome = if valid { Outcome::Valid } else { Outcome::Invalid };
            report.emp = Some(emp_info(&dag, &emp));
            code = if valid { 0 } else { 1 };
        }
        Command::Minimal => {
            let found = enumerate_minimal(&dag, cli.node_limit, &opts)?;
            report.minimal = Some(minimal_info(&dag, &found));
        }
    }
    let text = match cli.format {
        OutputFormat::Table => report::render_table(&report),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
    };
    Ok(Output { text, code })
}
