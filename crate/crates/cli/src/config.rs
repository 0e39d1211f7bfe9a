use clap::{Parser, ValueEnum};
use serde::Serialize;

use empkit_core::synthesis::Strategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Classify,
    Synthesize,
    Verify,
    Minimal,
    ExportDot,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Synthesize => "synthesize",
            Command::Verify => "verify",
            Command::Minimal => "minimal",
            Command::ExportDot => "export-dot",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyArg {
    #[default]
    ColLtr,
    ColRtl,
    RowTtb,
    Explicit,
}

impl StrategyArg {
    pub fn name(self) -> &'static str {
        match self {
            StrategyArg::ColLtr => "col-ltr",
            StrategyArg::ColRtl => "col-rtl",
            StrategyArg::RowTtb => "row-ttb",
            StrategyArg::Explicit => "explicit",
        }
    }

    /// `None` for the explicit construction.
    pub fn procedure(self) -> Option<Strategy> {
        match self {
            StrategyArg::ColLtr => Some(Strategy::ColumnLtr),
            StrategyArg::ColRtl => Some(Strategy::ColumnRtl),
            StrategyArg::RowTtb => Some(Strategy::RowTtb),
            StrategyArg::Explicit => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
}

/// Design excitation and measurement patterns for DAG dynamic networks.
#[derive(Debug, Clone, Parser)]
#[command(name = "empkit", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Graph file: {"nodes": [...], "edges": [[tail, head], ...]}
    pub graph: String,
    /// EMP in compact form over topological indices, e.g. E125,M23467
    #[arg(long)]
    pub emp: Option<String>,
    #[arg(long, value_enum, default_value_t)]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
    #[arg(long, default_value_t = 10)]
    pub node_limit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub trials: usize,
    pub strategy: StrategyArg,
    pub output_format: OutputFormat,
    pub node_limit: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            trials: 3,
            strategy: StrategyArg::ColLtr,
            output_format: OutputFormat::Table,
            node_limit: 10,
        }
    }
}

impl Cli {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            seed: self.seed,
            trials: self.trials,
            strategy: self.strategy,
            output_format: self.format,
            node_limit: self.node_limit,
        }
    }

    /// Canonical command line, with every option spelled out.
    pub fn echo(&self) -> String {
        let mut parts = vec!["empkit".to_string(), self.command.name().to_string(), self.graph.clone()];
        if let Some(emp) = &self.emp {
            parts.push(format!("--emp {emp}"));
        }
        parts.push(format!("--strategy {}", self.strategy.name()));
        parts.push(format!("--seed {}", self.seed));
        parts.push(format!("--trials {}", self.trials));
        parts.push(format!("--format {}", if self.format == OutputFormat::Json { "json" } else { "table" }));
        parts.push(format!("--node-limit {}", self.node_limit));
        parts.join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cli = Cli::parse_from(["empkit", "classify", "g.json"]);
        assert_eq!(cli.config(), RunConfig::default());
        assert_eq!(
            cli.echo(),
            "empkit classify g.json --strategy col-ltr --seed 42 --trials 3 --format table --node-limit 10"
        );
    }

    #[test]
    fn options() {
        let cli = Cli::parse_from([
            "empkit",
            "verify",
            "g.json",
            "--emp",
            "E1,M2",
            "--strategy",
            "row-ttb",
            "--format",
            "json",
            "--seed",
            "7",
        ]);
        assert_eq!(cli.command, Command::Verify);
        assert_eq!(cli.strategy.procedure(), Some(Strategy::RowTtb));
        assert_eq!(cli.config().seed, 7);
        assert!(Cli::try_parse_from(["empkit", "frobnicate", "g.json"]).is_err());
    }
}
