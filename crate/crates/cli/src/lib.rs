//! Configuration loading, sweeps and CSV reports for the `twdf` binary.

pub mod commands;
pub mod config;
pub mod sweep;

pub use config::{load_config, resolve, ConfigError, Layer};
pub use sweep::{run_sweep, write_sweep_csv, Mode, SweepParam, SweepRange, SweepRow, SweepSpec};

/// Worker-count override for sweeps and Monte Carlo batches.
pub const THREADS_ENV: &str = "TWDF_THREADS";

/// Reads [`THREADS_ENV`]; `None` when unset or empty, meaning one worker per core.
pub fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(format!("{THREADS_ENV}: {e}")),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got `{v}`")),
        },
    }
}
