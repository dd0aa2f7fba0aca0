//! Parameter sweeps and their CSV rows.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;
use twdf_core::analytics::{diversity_gain, energy_efficiency_with, system_outage};
use twdf_core::montecarlo::{estimate_outage, DEFAULT_TRIALS};
use twdf_core::{HardwareProfile64, SimEstimate, SystemConfig64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("invalid sweep {what}: {reason}")]
    Spec { what: &'static str, reason: String },
    #[error("sweep point {param} = {value}: {source}")]
    Point {
        param: SweepParam,
        value: f64,
        source: twdf_core::Error,
    },
}

fn spec_err(what: &'static str, reason: impl Into<String>) -> SweepError {
    SweepError::Spec {
        what,
        reason: reason.into(),
    }
}

/// Swept quantity. Names match the config keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    PoDbm,
    Beta,
    /// SNDR threshold; `R_th` is adjusted to hit it.
    GammaTh,
    RTh,
    N,
    /// Symmetric impairment level `k1 = k2`.
    KAve,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::PoDbm => "Po_dBm",
            SweepParam::Beta => "beta",
            SweepParam::GammaTh => "gamma_th",
            SweepParam::RTh => "R_th",
            SweepParam::N => "N",
            SweepParam::KAve => "k_ave",
        }
    }

    pub fn apply(self, cfg: &SystemConfig64, value: f64) -> twdf_core::Result<SystemConfig64> {
        match self {
            SweepParam::PoDbm => cfg.with_tx_power_dbm(value),
            SweepParam::Beta => cfg.with_beta(value),
            SweepParam::GammaTh => cfg.with_sndr_threshold(value),
            SweepParam::RTh => cfg.with(|p| p.target_rate = value),
            SweepParam::N => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(twdf_core::Error::InvalidParameter {
                        name: "quadrature_order",
                        reason: format!("must be a positive integer, got {value}"),
                    });
                }
                cfg.with(|p| p.quadrature_order = value as usize)
            }
            SweepParam::KAve => cfg.with_hardware(HardwareProfile64::symmetric(value)?),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, SweepError> {
        Ok(match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "po_dbm" | "po" => SweepParam::PoDbm,
            "beta" => SweepParam::Beta,
            "gamma_th" => SweepParam::GammaTh,
            "r_th" => SweepParam::RTh,
            "n" => SweepParam::N,
            "k_ave" | "k" => SweepParam::KAve,
            _ => {
                return Err(spec_err(
                    "parameter",
                    format!("`{s}` is not one of Po_dBm, beta, gamma_th, R_th, N, k_ave"),
                ))
            }
        })
    }
}

/// Sweep values: `start:stop:step` (inclusive of `stop`) or a comma list.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRange(Vec<f64>);

impl SweepRange {
    pub fn stepped(start: f64, stop: f64, step: f64) -> Result<Self, SweepError> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(spec_err("range", format!("step must be > 0, got {step}")));
        }
        if !(start.is_finite() && stop.is_finite()) || stop < start {
            return Err(spec_err("range", format!("need start <= stop, got {start}:{stop}")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 1_000_000 {
            return Err(spec_err("range", format!("{count} points is too many")));
        }
        // multiply rather than accumulate so long ranges land on round values
        Ok(SweepRange((0..count).map(|i| start + step * i as f64).collect()))
    }

    pub fn list(values: Vec<f64>) -> Result<Self, SweepError> {
        if values.is_empty() {
            return Err(spec_err("range", "empty list"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(spec_err("range", format!("non-finite value {v}")));
        }
        Ok(SweepRange(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl FromStr for SweepRange {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, SweepError> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| spec_err("range", format!("`{}` is not a number", t.trim())))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [start, stop, step] => Self::stepped(num(start)?, num(stop)?, num(step)?),
            [single] => Self::list(single.split(',').filter(|t| !t.trim().is_empty()).map(num).collect::<Result<_, _>>()?),
            _ => Err(spec_err("range", format!("`{s}` is neither start:stop:step nor a comma list"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    Simulation,
    Both,
}

impl Mode {
    fn analytic(self) -> bool {
        self != Mode::Simulation
    }

    fn simulation(self) -> bool {
        self != Mode::Analytic
    }
}

impl FromStr for Mode {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, SweepError> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(Mode::Analytic),
            "simulation" | "sim" => Ok(Mode::Simulation),
            "both" => Ok(Mode::Both),
            _ => Err(spec_err("mode", format!("`{s}` is not analytic, simulation or both"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub range: SweepRange,
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
}

impl SweepSpec {
    pub fn new(param: SweepParam, range: SweepRange, mode: Mode) -> Self {
        Self {
            param,
            range,
            mode,
            trials: DEFAULT_TRIALS,
            seed: 1,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.mode.simulation() && self.trials == 0 {
            return Err(spec_err("trials", "need at least one trial when simulating"));
        }
        Ok(())
    }
}

/// Analytic part of a row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticColumns {
    pub branch: &'static str,
    pub p_out: f64,
    pub p1: f64,
    pub p2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub analytic: Option<AnalyticColumns>,
    pub sim: Option<SimEstimate>,
    pub diversity: u32,
    pub ee: f64,
}

impl SweepRow {
    /// `|sim - analytic| / sim` when both are present and `sim > 0`.
    pub fn delta(&self) -> Option<f64> {
        match (self.analytic, self.sim) {
            (Some(a), Some(s)) if s.value > 0.0 => Some((s.value - a.p_out).abs() / s.value),
            _ => None,
        }
    }
}

/// Column order of [`write_sweep_csv`] after the swept value.
pub const SWEEP_COLUMNS: [&str; 9] = [
    "branch",
    "analytic_pout",
    "sim_pout",
    "sim_std_error",
    "p1",
    "p2",
    "delta",
    "diversity",
    "ee",
];

fn point(spec: &SweepSpec, base: &SystemConfig64, value: f64) -> Result<SweepRow, SweepError> {
    let wrap = |source| SweepError::Point {
        param: spec.param,
        value,
        source,
    };
    let cfg = spec.param.apply(base, value).map_err(wrap)?;
    let analytic = spec.mode.analytic().then(|| {
        let b = system_outage(&cfg);
        AnalyticColumns {
            branch: b.branch.tag(),
            p_out: b.p_out,
            p1: b.p1,
            p2: b.p2,
        }
    });
    let sim = if spec.mode.simulation() {
        // every point reuses the seed: common random numbers keep curves smooth
        Some(estimate_outage(&cfg, spec.trials, spec.seed).map_err(wrap)?)
    } else {
        None
    };
    let p_out = analytic.map(|a| a.p_out).or(sim.map(|s| s.value)).unwrap_or(f64::NAN);
    Ok(SweepRow {
        value,
        analytic,
        sim,
        diversity: diversity_gain(&cfg),
        ee: energy_efficiency_with(&cfg, p_out),
    })
}

/// Evaluates every point, in parallel, returning rows in sweep order.
pub fn run_sweep(spec: &SweepSpec, cfg: &SystemConfig64) -> Result<Vec<SweepRow>, SweepError> {
    spec.validate()?;
    spec.range.values().par_iter().map(|&v| point(spec, cfg, v)).collect()
}

/// Shortest round-trip form; exponent notation for probabilities.
pub fn sci(v: f64) -> String {
    format!("{v:e}")
}

pub fn write_sweep_csv<W: Write>(out: W, param: SweepParam, rows: &[SweepRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![param.name()];
    header.extend(SWEEP_COLUMNS);
    w.write_record(&header)?;
    let opt = |v: Option<f64>| v.map(sci).unwrap_or_default();
    for r in rows {
        let a = r.analytic;
        w.write_record([
            r.value.to_string(),
            a.map(|a| a.branch.to_string()).unwrap_or_default(),
            opt(a.map(|a| a.p_out)),
            opt(r.sim.map(|s| s.value)),
            opt(r.sim.map(|s| s.std_error)),
            opt(a.map(|a| a.p1)),
            opt(a.map(|a| a.p2)),
            opt(r.delta()),
            r.diversity.to_string(),
            sci(r.ee),
        ])?;
    }
    w.flush()?;
    Ok(())
}
