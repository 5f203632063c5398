mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use realonline::exec::{with_threads, Exec};

const EXIT_CONFIG: u8 = 2;
const EXIT_BOUND: u8 = 3;
const EXIT_RESOURCE: u8 = 4;
const EXIT_RUNTIME: u8 = 1;

#[derive(Parser)]
#[command(name = "realonline", version, about = "Online learning experiments on real-valued classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every cell of an experiment configuration.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; 1 runs sequentially.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// List registered learners, environments, losses and fixtures.
    List,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            print!("{}", realonline::registry::listing());
            ExitCode::SUCCESS
        }
        Command::Run { config, out, seed, jobs } => run_command(config, out, seed, jobs),
    }
}

fn run_command(path: PathBuf, out: Option<PathBuf>, seed: Option<u64>, jobs: Option<usize>) -> ExitCode {
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let base = path.parent().map(PathBuf::from).unwrap_or_default();
    let mut cfg = match config::parse(&text, &base) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(o) = out {
        cfg.out = o;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if jobs == Some(0) {
        eprintln!("--jobs must be at least 1");
        return ExitCode::from(EXIT_CONFIG);
    }
    let exec = if jobs == Some(1) { Exec::Sequential } else { Exec::Parallel };
    let result = match jobs {
        Some(k) => with_threads(k, || run::run(&cfg, exec)),
        None => run::run(&cfg, exec),
    };
    match result {
        Ok(summary) => {
            println!("{}", summary.display());
            ExitCode::SUCCESS
        }
        Err(run::RunError::BoundViolation(n)) => {
            eprintln!("{n} cell(s) violated a bound or failed certification; see summary.json");
            ExitCode::from(EXIT_BOUND)
        }
        Err(run::RunError::Resource(m)) => {
            eprintln!("resource limit: {m}");
            ExitCode::from(EXIT_RESOURCE)
        }
        Err(run::RunError::Runtime(m)) => {
            eprintln!("{m}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
