mod artifacts;
mod commands;
mod policy_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "graph-hjb",
    version,
    about = "Optimal control of a Markov chain on a graph with entropy-type costs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the value function and optimal intensities on a time grid.
    Solve {
        problem: PathBuf,
        /// Number of time steps (default scales with T and the edge weights).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        steps: Option<u64>,
        /// Output prefix; defaults to the problem path without extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ergodic constant, Perron vectors and limiting intensities.
    Ergodic {
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of the objective under a policy.
    Simulate {
        problem: PathBuf,
        /// `optimal` or `constant:<policy.json>`.
        #[arg(long, default_value = "optimal", value_parser = parse_policy)]
        policy: PolicySpec,
        /// Start node.
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(2..))]
        paths: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Policy freezing steps (default 10^4 per unit of T).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        steps: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the closed form with RK4 and check the HJ residual.
    Check {
        problem: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        steps: Option<u64>,
    },
}

#[derive(Clone, Debug)]
pub enum PolicySpec {
    Optimal,
    Constant(PathBuf),
}

fn parse_policy(s: &str) -> Result<PolicySpec, String> {
    match s.split_once(':') {
        None if s == "optimal" => Ok(PolicySpec::Optimal),
        Some(("constant", file)) if !file.is_empty() => Ok(PolicySpec::Constant(file.into())),
        _ => Err("expected `optimal` or `constant:<file>`".into()),
    }
}

fn to_usize(x: Option<u64>) -> Option<usize> {
    x.map(|v| usize::try_from(v).unwrap_or(usize::MAX))
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let written = match cli.command {
        Command::Solve {
            problem,
            steps,
            out,
        } => commands::solve(&problem, to_usize(steps), out)?,
        Command::Ergodic { problem, out } => commands::ergodic(&problem, out)?,
        Command::Simulate {
            problem,
            policy,
            start,
            paths,
            seed,
            steps,
            out,
        } => commands::simulate(
            &problem,
            commands::SimulateArgs {
                policy,
                start,
                paths: to_usize(Some(paths)).unwrap(),
                seed,
                steps: to_usize(steps),
                out,
            },
        )?,
        Command::Check { problem, steps } => return commands::check(&problem, to_usize(steps)),
    };
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
