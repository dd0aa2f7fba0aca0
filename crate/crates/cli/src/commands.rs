//! Single-configuration reports. Each writes one CSV table.

use std::io::Write;

use anyhow::Result;
use twdf_core::analytics::{
    diversity_gain, energy_efficiency, energy_efficiency_with, grid_argmin, optimal_beta, outage_slope, p1, p2,
    system_outage,
};
use twdf_core::linkmodel::watts_to_dbm;
use twdf_core::montecarlo::{estimate_link_probability, measure_diversity_slope};
use twdf_core::{LinkEvent, SystemConfig64};

use crate::sweep::sci;

fn po_dbm(cfg: &SystemConfig64) -> f64 {
    watts_to_dbm(cfg.params().tx_power)
}

pub const ANALYTIC_COLUMNS: [&str; 12] = [
    "Po_dBm", "gamma_th", "osc", "branch", "p_out", "p1", "p2", "delta1", "delta2", "phi", "diversity", "ee",
];

pub fn analytic<W: Write>(out: W, cfg: &SystemConfig64) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ANALYTIC_COLUMNS)?;
    let b = system_outage(cfg);
    let d = |f: fn(&twdf_core::Deltas64) -> f64| b.deltas.as_ref().map(|x| sci(f(x))).unwrap_or_default();
    w.write_record([
        po_dbm(cfg).to_string(),
        sci(cfg.sndr_threshold()),
        sci(cfg.hardware().osc_threshold()),
        b.branch.tag().to_string(),
        sci(b.p_out),
        sci(b.p1),
        sci(b.p2),
        d(|x| x.delta1),
        d(|x| x.delta2),
        d(|x| x.phi),
        diversity_gain(cfg).to_string(),
        sci(energy_efficiency(cfg)),
    ])?;
    w.flush()?;
    Ok(())
}

pub const SIMULATE_COLUMNS: [&str; 7] = ["event", "estimate", "hits", "trials", "std_error", "seed", "analytic"];

/// Closed form of an event where one exists.
fn closed_form(cfg: &SystemConfig64, event: LinkEvent) -> Option<f64> {
    match event {
        LinkEvent::DirectOutage => Some(p1(cfg)),
        LinkEvent::RelayJointSuccess => Some(p2(cfg)),
        LinkEvent::SystemOutage => Some(system_outage(cfg).p_out),
        LinkEvent::T2tA | LinkEvent::T2tB => None,
    }
}

pub fn simulate<W: Write>(out: W, cfg: &SystemConfig64, event: LinkEvent, trials: u64, seed: u64) -> Result<()> {
    let e = estimate_link_probability(cfg, trials, seed, event)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SIMULATE_COLUMNS)?;
    w.write_record([
        event_name(event).to_string(),
        sci(e.value),
        e.hits.to_string(),
        e.trials.to_string(),
        sci(e.std_error),
        e.seed.to_string(),
        closed_form(cfg, event).map(sci).unwrap_or_default(),
    ])?;
    w.flush()?;
    Ok(())
}

pub fn event_name(event: LinkEvent) -> &'static str {
    match event {
        LinkEvent::DirectOutage => "direct_outage",
        LinkEvent::RelayJointSuccess => "relay_joint_success",
        LinkEvent::T2tA => "t2t_a",
        LinkEvent::T2tB => "t2t_b",
        LinkEvent::SystemOutage => "system_outage",
    }
}

/// Grid rows tagged `grid`, then one `optimum` row.
pub fn optimal_beta_report<W: Write>(out: W, cfg: &SystemConfig64, resolution: usize) -> Result<()> {
    let r = optimal_beta(cfg, resolution)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["beta", "p_out", "kind"])?;
    for (beta, p) in &r.grid {
        w.write_record([beta.to_string(), sci(*p), "grid".into()])?;
    }
    w.write_record([r.beta.to_string(), sci(r.p_out), "optimum".into()])?;
    w.flush()?;
    Ok(())
}

pub const DIVERSITY_COLUMNS: [&str; 6] = ["low_dB", "high_dB", "diversity", "analytic_slope", "sim_slope", "trials"];

/// Slopes between two input SNRs `ρ = P_o/σ²` in dB. The simulated slope is
/// only computed when `trials` is given.
pub fn diversity<W: Write>(
    out: W,
    cfg: &SystemConfig64,
    low_db: f64,
    high_db: f64,
    trials: Option<u64>,
    seed: u64,
) -> Result<()> {
    let analytic = outage_slope(cfg, low_db, high_db)?;
    let sim = trials
        .map(|n| measure_diversity_slope(cfg, low_db, high_db, n, seed))
        .transpose()?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DIVERSITY_COLUMNS)?;
    w.write_record([
        low_db.to_string(),
        high_db.to_string(),
        diversity_gain(cfg).to_string(),
        analytic.to_string(),
        sim.map(|s| s.to_string()).unwrap_or_default(),
        trials.map(|n| n.to_string()).unwrap_or_default(),
    ])?;
    w.flush()?;
    Ok(())
}

/// Energy efficiency over transmit powers; the first maximizer is flagged.
pub fn ee<W: Write>(out: W, cfg: &SystemConfig64, powers_dbm: &[f64]) -> Result<()> {
    let rows = powers_dbm
        .iter()
        .map(|&dbm| {
            let c = cfg.with_tx_power_dbm(dbm)?;
            let p = system_outage(&c).p_out;
            Ok((dbm, p, energy_efficiency_with(&c, p)))
        })
        .collect::<Result<Vec<_>>>()?;
    // negate so the shared argmin picks the maximizer
    let neg: Vec<(f64, f64)> = rows.iter().map(|r| (r.0, -r.2)).collect();
    let best = grid_argmin(&neg);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["Po_dBm", "p_out", "ee", "is_max"])?;
    for (i, (dbm, p, e)) in rows.iter().enumerate() {
        w.write_record([dbm.to_string(), sci(*p), sci(*e), (i == best).to_string()])?;
    }
    w.flush()?;
    Ok(())
}
