use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coupled_fwm::{config, run, CliError, Command, RunOptions};

#[derive(Parser)]
#[command(name = "coupled-fwm", version, about = "Four-wave mixing in coupled waveguides")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the config's `output_dir`, then `out/<scenario>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Seed for stochastic inputs; overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Sub {
    /// Phase-matching contours per branch and coupling.
    Contours(Common),
    /// Idler gain against pump-2 coupling.
    GainScan(Common),
    /// Split-step propagation for each configured launch.
    Propagate(Common),
    /// Joint spectral amplitude and intensity.
    Jsa(Common),
    /// Schmidt decomposition and purity.
    Purity(Common),
    /// Geometry sweep, optionally refined.
    Sweep(Common),
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (command, common) = match cli.command {
        Sub::Contours(c) => (Command::Contours, c),
        Sub::GainScan(c) => (Command::GainScan, c),
        Sub::Propagate(c) => (Command::Propagate, c),
        Sub::Jsa(c) => (Command::Jsa, c),
        Sub::Purity(c) => (Command::Purity, c),
        Sub::Sweep(c) => (Command::Sweep, c),
    };
    let lc = config::load(&common.config)?;
    let out = match (&common.out, &lc.config.output_dir) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => lc.resolve(o),
        (None, None) => PathBuf::from("out").join(&lc.config.scenario),
    };
    let opts = RunOptions { seed: common.seed.or(lc.config.seed).unwrap_or(0) };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let manifest = pool.install(|| run(command, &lc, &out, opts))?;
    log::info!("{} artifacts in {}", manifest.artifacts.len(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
