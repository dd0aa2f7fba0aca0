//! Monte Carlo estimators driven by the instantaneous link model.
//!
//! Trials are split into fixed-size batches. Batch `i` draws from a ChaCha8
//! stream seeded with the user seed and stream id `i`, so an estimate depends
//! only on `(cfg, trials, seed)`, never on how many workers ran the batches.
//! Batch counts merge by addition.

use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytics::log_log_slope;
use crate::channel::sample_draw;
use crate::error::{Error, Result};
use crate::linkmodel::{end_to_end_sndrs, LinkSndrs, SystemConfig};
use crate::scalar::Real;

/// Trials per independently seeded batch.
pub const BATCH_TRIALS: u64 = 1 << 16;

/// Default trials per sweep point.
pub const DEFAULT_TRIALS: u64 = 1_000_000;

/// Empirical probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub value: f64,
    /// Trials in which the event occurred.
    pub hits: u64,
    pub trials: u64,
    /// `√(p(1-p)/n)`.
    pub std_error: f64,
    pub seed: u64,
}

impl SimEstimate {
    pub fn from_counts(hits: u64, trials: u64, seed: u64) -> Self {
        let value = hits as f64 / trials as f64;
        Self {
            value,
            hits,
            trials,
            std_error: (value * (1.0 - value) / trials as f64).sqrt(),
            seed,
        }
    }

    /// `|value - reference|` in units of the standard error. Infinite when the
    /// estimate has zero variance and disagrees with the reference.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = (self.value - reference).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }

    /// Standard error of the estimator if `reference` were the true
    /// probability: `√(p₀(1-p₀)/n)`.
    pub fn reference_std_error(&self, reference: f64) -> f64 {
        (reference * (1.0 - reference) / self.trials as f64).sqrt()
    }

    /// Score statistic: `|value - reference|` over [`Self::reference_std_error`].
    /// Stays finite when no events were observed.
    pub fn score_z(&self, reference: f64) -> f64 {
        let diff = (self.value - reference).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.reference_std_error(reference)
        }
    }
}

/// Event counted by [`estimate_link_probability`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkEvent {
    /// Direct link below threshold.
    DirectOutage,
    /// All four relay-link SNDRs above threshold.
    RelayJointSuccess,
    /// Terminal-to-terminal outage at `S_a` (selection-combined SNDR).
    T2tA,
    /// Terminal-to-terminal outage at `S_b`.
    T2tB,
    /// Direct outage and no joint relay success.
    SystemOutage,
}

impl LinkEvent {
    fn occurs<T: Real>(self, s: &LinkSndrs<T>, gamma_th: T) -> bool {
        match self {
            LinkEvent::DirectOutage => s.direct_outage(gamma_th),
            LinkEvent::RelayJointSuccess => s.relay_joint_success(gamma_th),
            LinkEvent::T2tA => s.gamma_a() < gamma_th,
            LinkEvent::T2tB => s.gamma_b() < gamma_th,
            LinkEvent::SystemOutage => s.system_outage(gamma_th),
        }
    }
}

impl FromStr for LinkEvent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "direct_outage" => Ok(LinkEvent::DirectOutage),
            "relay_joint_success" => Ok(LinkEvent::RelayJointSuccess),
            "t2t_a" => Ok(LinkEvent::T2tA),
            "t2t_b" => Ok(LinkEvent::T2tB),
            "system_outage" => Ok(LinkEvent::SystemOutage),
            other => Err(Error::InvalidParameter {
                name: "event",
                reason: format!("unknown event selector `{other}`"),
            }),
        }
    }
}

fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

fn count_batch<T: Real>(cfg: &SystemConfig<T>, event: LinkEvent, seed: u64, batch: u64, n: u64) -> u64 {
    let mut rng = batch_rng(seed, batch);
    let gamma_th = cfg.sndr_threshold();
    let channels = cfg.channels();
    let mut hits = 0;
    for _ in 0..n {
        let draw = sample_draw(&mut rng, channels);
        if event.occurs(&end_to_end_sndrs(&draw, cfg), gamma_th) {
            hits += 1;
        }
    }
    hits
}

/// Empirical frequency of `event` over `trials` fading realizations.
pub fn estimate_link_probability<T: Real>(
    cfg: &SystemConfig<T>,
    trials: u64,
    seed: u64,
    event: LinkEvent,
) -> Result<SimEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            reason: "need at least one trial".into(),
        });
    }
    let batches = trials.div_ceil(BATCH_TRIALS);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let n = (trials - b * BATCH_TRIALS).min(BATCH_TRIALS);
            count_batch(cfg, event, seed, b, n)
        })
        .sum();
    Ok(SimEstimate::from_counts(hits, trials, seed))
}

/// System outage: the direct link fails and the relay cannot complete the
/// exchange (it must decode both messages and both terminals must decode its
/// broadcast).
pub fn estimate_outage<T: Real>(cfg: &SystemConfig<T>, trials: u64, seed: u64) -> Result<SimEstimate> {
    estimate_link_probability(cfg, trials, seed, LinkEvent::SystemOutage)
}

/// Two-point log-log slope of the simulated outage against `ρ`; its negation
/// approximates the diversity order.
///
/// Both points use the same seed. Fails when either estimate has no outage
/// events. Estimates of exactly 1 are allowed and give a slope of 0.
pub fn measure_diversity_slope<T: Real>(
    cfg: &SystemConfig<T>,
    low_db: T,
    high_db: T,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    let lo = estimate_outage(&cfg.with_input_snr_db(low_db)?, trials, seed)?;
    let hi = estimate_outage(&cfg.with_input_snr_db(high_db)?, trials, seed)?;
    if lo.hits == 0 || hi.hits == 0 {
        return Err(Error::Degenerate(format!(
            "no outage events at {} dB or {} dB with {trials} trials",
            low_db, high_db
        )));
    }
    log_log_slope(lo.value, hi.value, low_db.to_f64_lossy(), high_db.to_f64_lossy())
}
