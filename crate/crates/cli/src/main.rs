//! `bellcheck`: run the verification suites from the command line and emit
//! machine-readable reports.
//!
//! Exit codes: 0 every check passed, 1 a mathematical check failed,
//! 2 invalid configuration or flags, 3 inconclusive (quadrature tail or
//! kernel resolution prevented a verdict).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bellcheck::error::Error as CoreError;
use commands::{cmd_all, cmd_foliation, cmd_semigroup, cmd_simulate, cmd_verify, Emitted};
use config::{resolve, ConfigError, Overrides};

#[derive(Parser)]
#[command(
    name = "bellcheck",
    version,
    about = "Certify sharp L^p martingale inequalities: pointwise Bellman-surface \
             conditions, foliation reconstruction, path simulation, and a \
             heat-semigroup quadrature battery"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the pointwise condition suite for each exponent
    Verify(CommonArgs),
    /// Simulate martingale batches and test the inequalities empirically
    Simulate(CommonArgs),
    /// Reconstruct the foliation: minimize K, tabulate leaves, check identities
    Foliation(CommonArgs),
    /// Run the heat-semigroup quadrature battery
    Semigroup(CommonArgs),
    /// Run every suite and emit one combined JSON report
    All(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Exponents p > 1, comma-separated or repeated
    #[arg(long = "p", value_name = "P", value_delimiter = ',')]
    p: Vec<f64>,

    /// Evaluation grid, e.g. 64x64:log:1e-3,1e3
    #[arg(long, value_name = "SPEC")]
    grid: Option<String>,

    /// Root seed for every randomized check
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,

    /// Override the per-command default sample/path count
    #[arg(long, value_name = "N")]
    samples: Option<u64>,

    /// Write the report here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format: json (default) or csv
    #[arg(long, value_name = "FMT")]
    format: Option<String>,

    /// Tolerance profile: standard (default), strict, or relaxed
    #[arg(long, value_name = "NAME")]
    tolerance_profile: Option<String>,

    /// TOML config file; flags override its values
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn overrides(self) -> Overrides {
        Overrides {
            p: self.p,
            grid: self.grid,
            seed: self.seed,
            samples: self.samples,
            out: self.out,
            format: self.format,
            tolerance_profile: self.tolerance_profile,
            config: self.config,
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<(Emitted, Option<PathBuf>)> {
    let (name, args) = match cli.cmd {
        Cmd::Verify(a) => ("verify", a),
        Cmd::Simulate(a) => ("simulate", a),
        Cmd::Foliation(a) => ("foliation", a),
        Cmd::Semigroup(a) => ("semigroup", a),
        Cmd::All(a) => ("all", a),
    };
    let flags = args.overrides();
    if name == "all" {
        // `all` resolves one config per section internally, so only the
        // --out flag (not a config-file `out`) picks its destination.
        let out = flags.out.clone();
        return Ok((cmd_all(&flags)?, out));
    }
    let cfg = resolve(name, &flags)?;
    let out = cfg.out.clone();
    let emitted = match name {
        "verify" => cmd_verify(&cfg)?,
        "simulate" => cmd_simulate(&cfg)?,
        "foliation" => cmd_foliation(&cfg)?,
        _ => cmd_semigroup(&cfg)?,
    };
    Ok((emitted, out))
}

fn error_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::UnderResolved { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((emitted, out)) => {
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, &emitted.text) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{}", emitted.text);
            }
            ExitCode::from(emitted.outcome.code())
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(error_code(&err))
        }
    }
}
