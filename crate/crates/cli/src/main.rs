//! Command-line front end: classification, Dirichlet extension, dilation and
//! kernel reports as JSON.

mod commands;
mod config;
mod failure;
mod io;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use annulus_dilation::Complex;
use clap::{Args, Parser, Subcommand};

use config::{JobConfig, Overrides};
use failure::Failure;

#[derive(Parser)]
#[command(name = "annulus-dilation", version, about = "Dilations of commuting normal tuples on the polyannulus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON file with default settings (same keys as the flags).
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a matrix as an annulus contraction or annulus unitary.
    Check(Common),
    /// Solve the Dirichlet problem for per-face boundary samples.
    Dirichlet {
        #[command(flatten)]
        common: Common,
        /// Write the evaluation table as CSV instead of embedding it.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Dilate a commuting tuple to boundary unitaries and verify the result.
    Dilate {
        #[command(flatten)]
        common: Common,
        /// Write the dilation bundle (atoms, V blocks, U_j scalars) to this file.
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
    /// Evaluate the annulus kernel at w.
    Kernel {
        #[command(flatten)]
        common: Common,
        /// The point w, as `re` or `re,im`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        w: Complex<f64>,
    },
}

fn parse_complex(s: &str) -> Result<Complex<f64>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex::new(num(re)?, num(im)?)),
        _ => Err("expected `re` or `re,im`".into()),
    }
}

fn run(cli: Cli) -> Result<commands::Outcome, Failure> {
    let resolve = |c: &Common| JobConfig::resolve(c.config.as_deref(), &c.flags);
    match cli.command {
        Command::Check(c) => commands::check(&mut resolve(&c)?),
        Command::Dirichlet { common, table } => commands::dirichlet(&mut resolve(&common)?, table.as_deref()),
        Command::Dilate { common, bundle } => commands::dilate(&mut resolve(&common)?, bundle.as_deref()),
        Command::Kernel { common, w } => commands::kernel(&mut resolve(&common)?, w),
    }
}

fn emit(outcome: &commands::Outcome) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(&outcome.report).expect("report serializes") + "\n";
    let out = outcome.report["config"]["out"].as_str().map(PathBuf::from);
    match out {
        Some(path) => std::fs::write(&path, text).map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Internal(format!("cannot write stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = run(cli).and_then(|outcome| emit(&outcome).map(|_| outcome));
    match result {
        Ok(outcome) => {
            if let Some(d) = &outcome.diagnostic {
                eprintln!("annulus-dilation: {d}");
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(f) => {
            eprintln!("annulus-dilation: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
