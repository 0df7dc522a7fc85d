use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use formkit_cli::commands;
use formkit_cli::resolve_tolerance;

/// Semibounded Hermitian forms from JSON: inspect, decompose by
/// contractions, represent by selfadjoint relations, take parallel sums,
/// and follow monotone limits.
#[derive(Parser)]
#[command(name = "formkit", version, disable_help_subcommand = true)]
struct Cli {
    /// Relative singular-value cutoff for rank decisions.
    #[arg(long = "tol-rank", global = true, value_name = "X")]
    tol_rank: Option<f64>,
    /// Absolute tolerance for equality tests.
    #[arg(long = "tol-eq", global = true, value_name = "Y")]
    tol_eq: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the structural summary of a document.
    Inspect { path: PathBuf },
    /// Split a form into t1 + t2, driven by a contraction or the Lebesgue
    /// decomposition; writes t1.json, t2.json, k.json next to the input.
    Decompose {
        form: PathBuf,
        /// Shift c <= m(t).
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        /// Contraction document generating the decomposition.
        #[arg(long, value_name = "PATH", conflicts_with = "lebesgue")]
        contraction: Option<PathBuf>,
        /// Use the Lebesgue decomposition (regular + singular part).
        #[arg(long)]
        lebesgue: bool,
    },
    /// Build the selfadjoint relation of a form; writes relation.json.
    Represent {
        form: PathBuf,
        /// Shift c <= m(t).
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
    },
    /// Parallel sum of two nonnegative forms; writes parallel.json.
    Parallel { h1: PathBuf, h2: PathBuf },
    /// Monotone limit of a form sequence with a resolvent error table.
    Limit {
        seq: PathBuf,
        /// Spectral point below every lower bound.
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        /// Number of sequence terms to tabulate (>= 3).
        #[arg(long = "n-max")]
        n_max: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env_override = std::env::var("FORMKIT_TOL_OVERRIDE").ok();
    let tol = match resolve_tolerance(cli.tol_rank, cli.tol_eq, env_override.as_deref()) {
        Ok(t) => t,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(3);
        }
    };
    let outcome = match &cli.command {
        Command::Inspect { path } => commands::cmd_inspect(path, &tol),
        Command::Decompose {
            form,
            c,
            contraction,
            lebesgue,
        } => commands::cmd_decompose(form, *c, contraction.as_ref(), *lebesgue, &tol),
        Command::Represent { form, c } => commands::cmd_represent(form, *c, &tol),
        Command::Parallel { h1, h2 } => commands::cmd_parallel(h1, h2, &tol),
        Command::Limit { seq, lambda, n_max } => commands::cmd_limit(seq, *lambda, *n_max, &tol),
    };
    match outcome {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
