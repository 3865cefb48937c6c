//! `landau-torus`: batch driver for the magnetic-torus studies.
//!
//! Usage: `landau-torus <subcommand> [--config <path>] [--set key=value ...]
//! [--out <dir>]`. Exit codes: 0 all assertions pass, 1 an assertion
//! failed, 2 configuration parse error, 3 validation error, 4 numerical
//! non-convergence.

mod config;
mod report;
mod runner;
mod svg;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use config::{LoadError, RunConfig};
use landau_core::Error;

#[derive(Parser)]
#[command(name = "landau-torus", about = "Landau-level machinery on a magnetic torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// JSON configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dotted-path overrides, e.g. `--set torus.degeneracy=8`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory for CSV/JSON/SVG artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Build and validate the orbital basis.
    Basis(CommonArgs),
    /// Projector-kernel convergence study.
    Projector(CommonArgs),
    /// Husimi occupation tables of the Fermi sea.
    Husimi(CommonArgs),
    /// Solve the partial-level electrostatic minimization.
    Qll(CommonArgs),
    /// Exact diagonalization study.
    Ed(CommonArgs),
    /// Run the full property battery.
    Verify(CommonArgs),
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("LANDAU_TORUS_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    let (name, args): (&str, &CommonArgs) = match &cli.command {
        Command::Basis(a) => ("basis", a),
        Command::Projector(a) => ("projector", a),
        Command::Husimi(a) => ("husimi", a),
        Command::Qll(a) => ("qll", a),
        Command::Ed(a) => ("ed", a),
        Command::Verify(a) => ("verify", a),
    };

    let config = match RunConfig::load(args.config.as_deref(), &args.set) {
        Ok(c) => c,
        Err(LoadError::Parse(message)) => {
            eprintln!("configuration error: {message}");
            return ExitCode::from(2);
        }
    };
    // Early physical validation, before any artifact is written.
    if let Err(e) = config.torus_config().and_then(|_| config.grid_config()) {
        eprintln!("validation error: {e}");
        return ExitCode::from(3);
    }
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("cannot create output directory: {e}");
        return ExitCode::from(3);
    }

    let result = match name {
        "basis" => runner::run_basis(&config, &args.out),
        "projector" => runner::run_projector(&config, &args.out),
        "husimi" => runner::run_husimi(&config, &args.out),
        "qll" => runner::run_qll(&config, &args.out),
        "ed" => runner::run_ed(&config, &args.out),
        "verify" => runner::run_verify(&config, &args.out),
        _ => unreachable!("all subcommands dispatched"),
    };

    match result {
        Ok(summary) => {
            if name != "verify" {
                runner::print_summary(&summary);
            } else {
                println!("overall: {}", if summary.pass { "PASS" } else { "FAIL" });
            }
            if let Err(e) = summary.write(&args.out.join("summary.json")) {
                eprintln!("cannot write summary: {e}");
                return ExitCode::from(3);
            }
            if summary.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NonConverged(_) => ExitCode::from(4),
                _ => ExitCode::from(3),
            }
        }
    }
}
