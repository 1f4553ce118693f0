use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use beamout::{cmd_optimize, cmd_point, cmd_sweep, CliError, ScenarioConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    version,
    about = "Outage probability and beamwidth optimization for positioning-assisted beamforming"
)]
struct Cli {
    /// Scenario file (flat `key = value` lines)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regime, bounds and both oracles at a single operating point
    Point,
    /// One CSV row per grid point along the configured sweep axis
    Sweep {
        /// Write the CSV here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal beamwidth for the configured transmit budget
    Optimize {
        /// Also locate the minimum of the exact outage on a 200-point grid
        #[arg(long)]
        verify: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let path = cli.config.ok_or(beamout::config::ConfigError::Command(
        "--config <path> is required",
    ))?;
    let cfg = ScenarioConfig::from_file(&path)?;
    let mut err = io::stderr().lock();
    for w in &cfg.warnings {
        writeln!(err, "warning: {w}")?;
    }
    let mut out = io::stdout().lock();

    match cli.command {
        Command::Point => {
            cmd_point(&cfg, &mut out)?;
        }
        Command::Sweep { out: target } => {
            let sweep = cmd_sweep(&cfg)?;
            match target {
                Some(p) => fs::write(p, &sweep.csv)?,
                None => out.write_all(&sweep.csv)?,
            }
            let rows = sweep.rows.len();
            if sweep.bound_violations > 0 {
                writeln!(
                    err,
                    "warning: {} of {rows} rows fall outside their bounds",
                    sweep.bound_violations
                )?;
            }
            writeln!(
                err,
                "statistical check: {} of {} sampled rows outside 4 standard errors",
                sweep.statistical_violations, sweep.sampled_rows
            )?;
            if sweep.statistical_violations * 100 > sweep.sampled_rows {
                writeln!(
                    err,
                    "warning: more than 1% of sampled rows disagree with the quadrature"
                )?;
            }
        }
        Command::Optimize { verify } => {
            cmd_optimize(&cfg, verify, &mut out, &mut err)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
