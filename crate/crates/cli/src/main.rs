//! `rabi` — seeded experiment runner for the monitored-qubit estimator.
//!
//! Two subcommands: `ensemble` averages knowledge measures over many
//! independently seeded records; `trace` follows a single record at a fixed
//! true Ω with the full Bayesian filter readout. Both read the same flat
//! `key = value` config file and emit CSV artifacts plus a manifest that is
//! itself a valid config reproducing the run.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rabi_cli::config::{load_config, ConfigError, ExperimentConfig};
use rabi_cli::run::{run_ensemble, run_trace, RunError};

#[derive(Parser)]
#[command(name = "rabi", version, about = "Monitored-qubit Rabi-frequency estimation runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an ensemble of records and write averaged knowledge measures.
    Ensemble(CommonArgs),
    /// Run one record at the configured omega_true with a full filter trace.
    Trace(TraceArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the flat `key = value` config file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all available). Results never depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory; overrides RABI_OUT_DIR and the config's `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// True Rabi frequency for the trace; overrides the config's `omega_true`.
    #[arg(long)]
    omega_true: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Ensemble(args) => dispatch(&args, None),
        Command::Trace(args) => dispatch(&args.common, Some(args.omega_true)),
    };
    match code {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Loads and resolves the config, sets up the worker pool, and runs the
/// requested command. `trace_omega` is `Some` for the trace subcommand
/// (carrying an optional override).
fn dispatch(args: &CommonArgs, trace_omega: Option<Option<f64>>) -> Result<(), RunError> {
    let mut config = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(Some(omega)) = trace_omega {
        config.omega_true = omega;
        config.validate()?;
    }
    let out_dir = resolve_out_dir(args, &config)?;
    config.out_dir = Some(out_dir.clone());

    if let Some(threads) = args.threads {
        if threads == 0 {
            return Err(ConfigError::Invalid("--threads must be at least 1".into()).into());
        }
        // Ignore the error from configuring the pool twice in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }

    let written = if trace_omega.is_some() {
        run_trace(&config, &out_dir)?
    } else {
        run_ensemble(&config, &out_dir)?
    };
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Output directory precedence: `--out` flag, then `RABI_OUT_DIR`, then the
/// config's `out_dir`. Having none is a config error.
fn resolve_out_dir(args: &CommonArgs, config: &ExperimentConfig) -> Result<PathBuf, ConfigError> {
    if let Some(dir) = &args.out {
        return Ok(dir.clone());
    }
    if let Some(dir) = std::env::var_os("RABI_OUT_DIR") {
        if !dir.is_empty() {
            return Ok(PathBuf::from(dir));
        }
    }
    config.out_dir.clone().ok_or_else(|| {
        ConfigError::Invalid("no output directory (use --out, RABI_OUT_DIR, or out_dir)".into())
    })
}
