mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit 1: a mathematical check failed or an obstruction was found.
/// Exit 2: the input could not be read, parsed or matched.
#[derive(Debug)]
pub enum Failure {
    Math(String),
    Usage(String),
}

#[derive(Parser)]
#[command(name = "fedosov", version, about = "Exact Fedosov quantization of symplectic Lie algebroid charts")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Job configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Truncation order N; overrides the config.
    #[arg(long)]
    order: Option<usize>,
    /// Sampling seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for report.json, report.txt and artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate the algebroid axioms of the chart.
    Check(Common),
    /// Construct the Fedosov connection and write it with a curvature certificate.
    Build(Common),
    /// Star product of two polynomials.
    Star {
        #[command(flatten)]
        common: Common,
        f: String,
        g: String,
    },
    /// Bidifferential coefficients of the star product.
    Tensor(Common),
    /// Associativity, unit, Poisson and symbol checks on random samples.
    Verify(Common),
    /// Characteristic class of the connection.
    Class(Common),
    /// Gauge equivalence between two connections, or the obstruction.
    Gauge(Common),
    /// Trace property of the Moyal product on the torus model.
    Trace(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Check(c) => commands::run("check", c, commands::check),
        Cmd::Build(c) => commands::run("build", c, commands::build),
        Cmd::Star { common, f, g } => commands::run("star", common, |job| commands::star(job, f, g)),
        Cmd::Tensor(c) => commands::run("tensor", c, commands::tensor),
        Cmd::Verify(c) => commands::run("verify", c, commands::verify),
        Cmd::Class(c) => commands::run("class", c, commands::class),
        Cmd::Gauge(c) => commands::run("gauge", c, commands::gauge),
        Cmd::Trace(c) => commands::run("trace", c, commands::trace),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Math(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
