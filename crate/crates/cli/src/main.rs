use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use shtc_cli::{eigen, exit_code, simulate, verify};

#[derive(Parser)]
#[command(
    name = "shtc",
    version,
    about = "Barotropic two-fluid model: structure checks, simulation, eigenstructure"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample equilibrium states, run every structural check, write a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the finite-volume solver and write snapshot and diagnostics CSV files.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        outdir: PathBuf,
    },
    /// Print eigenvalues, eigenvectors, residuals and field characters at a state.
    Eigen {
        #[arg(long)]
        config: PathBuf,
        /// `alpha,c,rho,u,w`
        #[arg(long, allow_hyphen_values = true)]
        state: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SHTC_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Verify { config, out } => verify::cmd_verify(config, out),
        Command::Simulate { config, outdir } => simulate::cmd_simulate(config, outdir),
        Command::Eigen { config, state } => eigen::cmd_eigen(config, state),
    };
    match result {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
