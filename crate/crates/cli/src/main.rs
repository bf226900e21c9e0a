//! `moyal`: runs the moyal-core experiments and writes CSV/JSON/field files plus a manifest.
//!
//! Exit codes: 0 ok, 2 validation failure, 3 internal invariant breach.

mod commands;
mod output;
mod presets;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "moyal", version, about = "Twisted products, Moyal series and their diagnostics on uniform grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct ThetaArgs {
    /// symplectic2, zero, degenerate, or a JSON matrix file
    #[arg(long, default_value = "symplectic2")]
    pub theta: String,
    /// t in θ = t·J for symplectic2; multiplies a file matrix
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Args, Clone)]
pub struct OutArgs {
    /// Output prefix; files are PREFIX.<ext> plus PREFIX.manifest.json
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Twisted product f×g on a grid
    Star(commands::StarArgs),
    /// Moyal series terms, norms against the term bound, ratio verdict
    Series(commands::SeriesArgs),
    /// Term values u(h_n) for the Gaussian pair and the divergence verdict
    Prop1(commands::Prop1Args),
    /// Multiplier certificates for the twist phase and the Cauchy domination check
    Bounds(commands::BoundsArgs),
    /// Distance of f×g from f·g as θ shrinks
    Continuity(commands::ContinuityArgs),
    /// Witness function checks: domination and moment lower bounds
    Witness(commands::WitnessArgs),
    /// θ=0 reduction, associativity, involution and the product/convolution link
    Algebra(commands::AlgebraArgs),
    /// Twisted product of tensor products on the line x₂ = 0
    Slice(commands::SliceArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Star(a) => commands::star(a),
        Command::Series(a) => commands::series(a),
        Command::Prop1(a) => commands::prop1(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Continuity(a) => commands::continuity(a),
        Command::Witness(a) => commands::witness(a),
        Command::Algebra(a) => commands::algebra(a),
        Command::Slice(a) => commands::slice(a),
    };
    match result {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
