#![allow(clippy::neg_cmp_op_on_partial_ord)]
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bingham_dae::scenarios::ScenarioId;
use bingham_dae_cli::commands::{self, CliError, ErrorCategory, GridAxis, Outcome};
use bingham_dae_cli::config::RunConfig;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bingham-dae", version, about = "Mass-spring-Bingham dashpot simulator")]
struct Cli {
    /// Output directory (default: $BINGHAM_DAE_OUT_DIR, then the current directory).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a configuration file.
    Run {
        config: PathBuf,
        /// Also write one SVG per variable.
        #[arg(long)]
        plots: bool,
    },
    /// Run a reference scenario: f1, f2, small or large.
    Paper {
        case: ScenarioId,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        plots: bool,
    },
    /// Check a trajectory CSV against the discrete equations and the inclusion.
    Verify {
        csv: PathBuf,
        /// Configuration supplying m, k and the law (reference values otherwise).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Residual bound.
        #[arg(long)]
        tol: Option<f64>,
        /// Inclusion distance bound.
        #[arg(long)]
        inclusion_tol: Option<f64>,
    },
    /// Self-convergence table.
    Converge {
        config: PathBuf,
        /// Comma-separated, strictly decreasing step sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        dt: Vec<f64>,
        /// Reference step size (default: smallest dt / 10).
        #[arg(long)]
        dt_ref: Option<f64>,
    },
    /// Compare against the single-valued signum integrator.
    CompareNaive { config: PathBuf },
    /// Run a cartesian parameter grid.
    Sweep {
        config: PathBuf,
        /// Axis as key=v1,v2,...; repeat for more axes.
        #[arg(long = "grid", required = true)]
        grid: Vec<String>,
    },
}

fn load(path: &Path) -> Result<RunConfig, CliError> {
    Ok(RunConfig::from_map(&commands::read_config(path)?)?)
}

fn execute(cli: Cli) -> Result<Outcome, CliError> {
    let out_dir = commands::resolve_out_dir(cli.out_dir.as_deref());
    match cli.command {
        Command::Run { config, plots } => commands::cmd_run(&load(&config)?, &out_dir, plots),
        Command::Paper { case, t_end, plots } => commands::cmd_paper(case, t_end, &out_dir, plots),
        Command::Verify { csv, config, tol, inclusion_tol } => {
            let law = config.as_deref().map(load).transpose()?;
            commands::cmd_verify(&csv, law.as_ref(), tol, inclusion_tol)
        }
        Command::Converge { config, dt, dt_ref } => {
            let (out, rows) = commands::cmd_converge(&load(&config)?, &dt, dt_ref, &out_dir)?;
            print!("{}", commands::convergence_table(&rows));
            Ok(Outcome { report: Default::default(), files: out.files })
        }
        Command::CompareNaive { config } => commands::cmd_compare_naive(&load(&config)?, &out_dir),
        Command::Sweep { config, grid } => {
            let axes = grid.iter().map(|g| g.parse::<GridAxis>()).collect::<Result<Vec<_>, _>>()?;
            commands::cmd_sweep(&commands::read_config(&config)?, &axes, &out_dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.kind().to_string();
            eprintln!("{}", CliError::new(ErrorCategory::Usage, msg));
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match execute(cli) {
        Ok(out) => {
            print!("{}", out.report.render());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
