use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use twdf_cli::sweep::{Mode, SweepParam, SweepRange, SweepSpec};
use twdf_cli::{commands, config, run_sweep, threads_from_env, write_sweep_csv};
use twdf_core::analytics::BETA_GRID_POINTS;
use twdf_core::montecarlo::DEFAULT_TRIALS;
use twdf_core::LinkEvent;

/// Outage, diversity and energy efficiency of a SWIPT two-way DF relay with
/// hardware impairments. Writes CSV.
#[derive(Parser)]
#[command(name = "twdf", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Common {
    /// Flat key-value config file; unset keys keep their defaults.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set Po_dBm=-5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Verb {
    /// Closed-form outage breakdown for one configuration.
    Analytic {
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo estimate for one configuration.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// system_outage, direct_outage, relay_joint_success, t2t_a or t2t_b.
        #[arg(long, default_value = "system_outage")]
        event: LinkEvent,
    },
    /// One CSV row per value of a swept parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Po_dBm, beta, gamma_th, R_th, N or k_ave.
        #[arg(long)]
        param: SweepParam,
        /// `start:stop:step` (stop included) or `v1,v2,...`.
        #[arg(long, allow_hyphen_values = true)]
        range: SweepRange,
        /// analytic, simulation or both.
        #[arg(long, default_value = "analytic")]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Scan of P_out over the power-splitting ratio and its minimizer.
    OptimalBeta {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = BETA_GRID_POINTS)]
        resolution: usize,
    },
    /// Diversity gain and log-log outage slopes between two input SNRs.
    Diversity {
        #[command(flatten)]
        common: Common,
        /// Lower input SNR P_o/σ² in dB.
        #[arg(long, default_value_t = 40.0, allow_hyphen_values = true)]
        low: f64,
        #[arg(long, default_value_t = 50.0, allow_hyphen_values = true)]
        high: f64,
        /// Also measure the simulated slope with this many trials per point.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Energy efficiency over transmit power, maximizer flagged.
    Ee {
        #[command(flatten)]
        common: Common,
        /// Po_dBm values, as for `sweep --range`.
        #[arg(long, default_value = "-30:30:1", allow_hyphen_values = true)]
        range: SweepRange,
    },
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn load(common: &Common) -> Result<twdf_core::SystemConfig64> {
    Ok(config::resolve(common.config.as_deref(), &common.set)?)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = threads_from_env().map_err(anyhow::Error::msg)? {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.verb {
        Verb::Analytic { common } => {
            let cfg = load(&common)?;
            commands::analytic(sink(&common.out)?, &cfg)
        }
        Verb::Simulate {
            common,
            trials,
            seed,
            event,
        } => {
            let cfg = load(&common)?;
            commands::simulate(sink(&common.out)?, &cfg, event, trials, seed)
        }
        Verb::Sweep {
            common,
            param,
            range,
            mode,
            trials,
            seed,
        } => {
            let cfg = load(&common)?;
            let spec = SweepSpec {
                trials,
                seed,
                ..SweepSpec::new(param, range, mode)
            };
            // compute everything before touching the output file
            let rows = run_sweep(&spec, &cfg)?;
            write_sweep_csv(sink(&common.out)?, param, &rows)?;
            Ok(())
        }
        Verb::OptimalBeta { common, resolution } => {
            let cfg = load(&common)?;
            commands::optimal_beta_report(sink(&common.out)?, &cfg, resolution)
        }
        Verb::Diversity {
            common,
            low,
            high,
            trials,
            seed,
        } => {
            let cfg = load(&common)?;
            commands::diversity(sink(&common.out)?, &cfg, low, high, trials, seed)
        }
        Verb::Ee { common, range } => {
            let cfg = load(&common)?;
            commands::ee(sink(&common.out)?, &cfg, range.values())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("twdf: {e:#}");
            ExitCode::FAILURE
        }
    }
}
