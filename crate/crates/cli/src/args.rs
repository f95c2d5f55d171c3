use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "finapprox", version, about = "Decide and construct finite-approximate solutions of Lu = h under a finite-rank constraint")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep alpha, decide solvability, and cross-check with the range oracle when L is known.
    Analyze(RunArgs),
    /// Per-alpha resolvent norms.
    Sweep(RunArgs),
    /// Direct range-membership test (needs L).
    Oracle(RunArgs),
    /// Diagonal Galerkin study over a nested subspace family.
    Galerkin {
        #[command(flatten)]
        run: RunArgs,
        /// Number of diagonal steps (n, alpha) = (k, 10^-k).
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Validate a problem and report its defect norms.
    Validate(RunArgs),
    /// List the bundled scenarios.
    ScenariosList(OutputArgs),
    /// Write the problem as a JSON problem file.
    Export {
        #[command(flatten)]
        input: InputArgs,
        /// Destination file (stdout when omitted).
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct InputSource {
    /// Bundled scenario name.
    #[arg(long)]
    pub scenario: Option<String>,
    /// JSON problem file.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[command(flatten)]
    pub source: InputSource,
    /// Scenario parameter K=V (repeatable).
    #[arg(long = "param", value_name = "K=V", requires = "scenario")]
    pub params: Vec<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Report destination (stdout when omitted).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 1.0)]
    pub alpha0: f64,
    #[arg(long, default_value_t = 0.1)]
    pub ratio: f64,
    #[arg(long, default_value_t = 8)]
    pub count: usize,
    /// Override the decision tolerance of the problem.
    #[arg(long)]
    pub tol_decision: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Worker threads; 1 runs sequentially, 0 uses all cores.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}
