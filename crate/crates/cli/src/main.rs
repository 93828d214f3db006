//! `noisyreg` command-line front end. Every command prints one JSON document
//! on stdout; diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 usage, 2 variable budget exceeded, 3 numeric
//! precondition failed.

mod commands;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::spec::FunctionSpec;

#[derive(Debug, Parser)]
#[command(
    name = "noisyreg",
    version,
    about = "Noisy-influence regularity and Majority-is-Stablest checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// Function: maj:n, parity:i,j[/n], dictator:i[/n], tribes:w,s, random:n,seed, constant:n,c or file:path.
    #[arg(long = "fn", value_name = "SPEC")]
    function: FunctionSpec,

    /// Indent the JSON report.
    #[arg(long)]
    pretty: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fourier spectrum, noisy influences and stability profile.
    Analyze {
        #[command(flatten)]
        input: Input,
        /// Noise rate for the influences.
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
    /// Regularity decomposition into a decision tree.
    Decompose {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        gamma: f64,
        /// Build a homogeneous tree (one variable per level).
        #[arg(long)]
        hom: bool,
        /// Largest queried set allowed with --hom; defaults to n.
        #[arg(long, requires = "hom")]
        var_cap: Option<usize>,
        /// Write the tree in DOT format.
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Stability against the Gaussian quadrant probability. ±1-valued inputs
    /// are mapped to {0,1} by (1-f)/2. Passing --eps, --delta, --gamma,
    /// --q-eps and --q-delta runs the full decomposition pipeline.
    Mist {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        rho: f64,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Absolute tolerance of the quadrature.
        #[arg(long, default_value_t = 1e-9)]
        quad_tol: f64,
    },
    /// Write the truth table of a function.
    Generate {
        /// Function spec, as for the other commands.
        #[arg(long = "fn", value_name = "SPEC")]
        function: FunctionSpec,
        /// Output file; stdout when absent.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// The asymptotic parameter schedule for a target eps.
    Params {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        pretty: bool,
    },
}

#[derive(Debug, Args)]
#[group(multiple = true, requires_all = ["eps", "delta", "gamma", "q_eps", "q_delta"])]
struct PipelineArgs {
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    q_eps: Option<f64>,
    #[arg(long)]
    q_delta: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            if let Some(partial) = &failure.partial {
                print!("{partial}");
            }
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
