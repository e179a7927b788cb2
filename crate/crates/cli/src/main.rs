//! `yflow`: run Yamabe flow scenarios, audit model spaces and probe the auxiliary inequalities.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Normalized Yamabe flow laboratory for rotationally symmetric model spaces.
///
/// Exit codes: 0 success, 1 a monitor or inequality check failed, 2 invalid input
/// (configuration, CSV or file access), 3 the solver aborted.
#[derive(Debug, Parser)]
#[command(name = "yflow", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Scenario configuration file (`key = value` lines).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory. Defaults to `output.dir` from the configuration, then `$YFLOW_OUT`,
    /// then `yflow-out`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the configured random seed.
    #[arg(long, global = true, value_parser = parse_seed)]
    pub seed: Option<u64>,
    /// Only print errors and warnings.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the flow with every configured monitor and write CSV, ledger and plots.
    Run {
        /// Run one scenario per value, e.g. `--sweep grid.M=128,256,512`. Each writes to
        /// `<out>/<PARAM>=<value>`.
        #[arg(long, value_name = "PARAM=a,b,c")]
        sweep: Option<String>,
    },
    /// Check the standing assumptions on the initial metric.
    Audit,
    /// Estimate the Yamabe constant of the initial conformal class.
    Yamabe,
    /// Search the auxiliary inequalities for counterexamples.
    Auxcheck {
        /// Inequality id (I1..I13 or LIM); all of them when omitted.
        #[arg(long)]
        ineq: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Sample just outside the declared region instead of inside it.
        #[arg(long)]
        outside: bool,
    },
    /// Print the Moser iteration ledger of a flow run.
    Moser,
    /// Render one SVG per series of a `timeseries.csv`.
    Plot { csv: PathBuf },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(commands::dispatch(&cli))
}
