mod args;
mod commands;
mod error;
mod report;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use clap::Parser;
use finapprox::Execution;

use crate::args::{Cli, Command};
use crate::commands::Status;
use crate::error::{CliError, EXIT_INTERNAL, EXIT_SINGULAR_ONLY};

/// Runs `f` on a pool of `jobs` workers; 1 means sequential.
fn with_jobs<R: Send>(jobs: usize, f: impl FnOnce(Execution) -> R + Send) -> Result<R, CliError> {
    if jobs == 1 {
        return Ok(f(Execution::Sequential));
    }
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(CliError::internal)?;
        Ok(pool.install(|| f(Execution::Parallel)))
    }
    #[cfg(not(feature = "parallel"))]
    Ok(f(Execution::Sequential))
}

fn run(cli: Cli) -> Result<Status, CliError> {
    match cli.command {
        Command::Analyze(a) => with_jobs(a.jobs, |e| commands::analyze(&a, e))?,
        Command::Sweep(a) => with_jobs(a.jobs, |e| commands::sweep(&a, e))?,
        Command::Oracle(a) => commands::oracle(&a),
        Command::Galerkin { run, steps } => with_jobs(run.jobs, |e| commands::galerkin(&run, steps, e))?,
        Command::Validate(a) => commands::validate(&a),
        Command::ScenariosList(o) => commands::scenarios_list(&o),
        Command::Export { input, output } => commands::export(&input, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match panic::catch_unwind(AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(Status::Ok)) => ExitCode::SUCCESS,
        Ok(Ok(Status::SingularOnly)) => {
            eprintln!("finapprox: every alpha in the schedule is singular");
            ExitCode::from(EXIT_SINGULAR_ONLY)
        }
        Ok(Err(e)) => {
            eprintln!("finapprox: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
