use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cortege::scenario::{resolve_out_dir, run_scenario, Mode, ScenarioConfig};

#[derive(Parser)]
#[command(name = "cortege", version, about = "Swarm dynamics with impulse exchange and cortege selection")]
struct Cli {
    #[command(subcommand)]
    mode: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Scenario TOML file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (CORTEGE_OUT_DIR takes precedence).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// One evolution over `dynamics.duration`.
    Evolve(RunArgs),
    /// Full selection chain.
    Select(RunArgs),
    /// Swarm density against the grid Schrödinger solver.
    OracleCompare(RunArgs),
    /// Coherent vs random-phase deposit Monte Carlo.
    DepositCheck(RunArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match cli.mode {
        Command::Evolve(a) => (Mode::Evolve, a),
        Command::Select(a) => (Mode::Select, a),
        Command::OracleCompare(a) => (Mode::OracleCompare, a),
        Command::DepositCheck(a) => (Mode::DepositCheck, a),
    };
    let config = match ScenarioConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("cortege::{}: {e}", e.module());
            return ExitCode::from(2);
        }
    };
    let seed = args.seed.unwrap_or(config.seed);
    let out = resolve_out_dir(args.out.as_deref(), &config);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(args.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cortege: cannot start thread pool: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| run_scenario(&config, mode, seed, &out)) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("cortege::{}: {e}", e.module());
            ExitCode::FAILURE
        }
    }
}
