use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pxlab::cli::{run, Command, RunOptions};

#[derive(Parser)]
#[command(name = "pxlab", version, about = "Loss and nonlinear phase in collective atom-photon models")]
struct Args {
    #[command(subcommand)]
    command: Cmd,

    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output data file; defaults to `<command>.json` or `<command>.csv`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "PXLAB_THREADS", default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Evolve the probe states under a pulse sequence.
    Evolve,
    /// Best nonlinear phase versus loss budget (CSV).
    Tradeoff,
    /// Run the zero-loss no-go certification over a model grid.
    NogoCert,
    /// Two-photon coupling product versus atom number (CSV).
    Scaling,
    /// Two-photon absorption on a lossy beam splitter versus distinguishability (CSV).
    Bs,
    /// Search for a postselected nonlinear-sign gate.
    Ns,
    /// Print or write the canonical form of a config.
    Canon,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Cmd::Evolve => Command::Evolve,
        Cmd::Tradeoff => Command::Tradeoff,
        Cmd::NogoCert => Command::NogoCert,
        Cmd::Scaling => Command::Scaling,
        Cmd::Bs => Command::Bs,
        Cmd::Ns => Command::Ns,
        Cmd::Canon => Command::Canon,
    };
    let Some(config) = args.config else {
        eprintln!("{}", serde_json::json!({"error": {"kind": "usage", "exit_code": 2, "message": "--config is required"}}));
        return ExitCode::from(2);
    };
    let opts = RunOptions {
        config,
        out: args.out,
        seed: args.seed,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .expect("thread pool");
    match pool.install(|| run(command, &opts)) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
