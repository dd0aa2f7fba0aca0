//! Closed-form system outage probability, diversity gain and energy
//! efficiency.
//!
//! The system is in outage when the direct link fails *and* the relaying
//! phase fails, so
//!
//! ```text
//! P_out = P1 · (1 - P2)
//! P1 = Pr{ (1 - κγ_th) ρ Z < γ_th }
//! P2 = Pr{ X > Δ1, Y > Δ1, X(X+Y) > Δ2, Y(X+Y) > Δ2 }
//! Δ1 = γ_th / ((1-β)(1-κγ_th)ρ),   Δ2 = γ_th / (ηβ(1-κγ_th)ρ)
//! ```
//!
//! with `κ = k1² + k2²`. Once `γ_th >= 1/κ` no SNDR can reach the threshold
//! and `P_out = 1` (the overall system ceiling).
//!
//! `P2` is an integral over the region of the `(x, y)` plane bounded by
//! `x = Δ1`, `y = Δ1` and the hyperbola-like curves `y(x+y) = Δ2`,
//! `x(x+y) = Δ2`. The curves meet on the diagonal at `√(Δ2/2)`:
//!
//! * `Δ1 >= √(Δ2/2)`: the harvesting constraints are implied by the decoding
//!   constraints and `P2` has an exact closed form ([`Branch::DecodeBound`]).
//! * `Δ1 < √(Δ2/2)`: the curved boundary is active between `√(Δ2/2)` and
//!   `Φ = Δ2/Δ1 - Δ1`; that piece is evaluated with an `N`-node
//!   Gauss–Chebyshev rule ([`Branch::HarvestBound`]).
//!
//! Both branches agree on the boundary `Δ1 = √(Δ2/2)`, where `Φ = Δ1` and the
//! quadrature interval has zero width, so the branch test is an exact float
//! comparison. Every term that appears once per relay link is produced by one
//! code path called with the `(a, b)` roles swapped.

use crate::error::{Error, Result};
use crate::linkmodel::{HardwareProfile, SystemConfig};
use crate::numerics::{
    ln_factorial, ln_upper_gamma, lower_gamma_increment, reg_lower, reg_upper, QuadratureRule,
};
use crate::scalar::Real;

/// Lower end of the PS-ratio search interval.
pub const BETA_SEARCH_MIN: f64 = 0.005;
/// Upper end of the PS-ratio search interval.
pub const BETA_SEARCH_MAX: f64 = 0.995;
/// Default number of grid points for [`optimal_beta`].
pub const BETA_GRID_POINTS: usize = 199;
/// Bracket width at which golden-section refinement stops.
pub const BETA_REFINE_WIDTH: f64 = 1e-4;

/// Which closed form produced an outage value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `γ_th >= 1/(k1²+k2²)`: outage is certain.
    OscCeiling,
    /// `Δ1 >= √(Δ2/2)`: relay decoding constraints dominate.
    DecodeBound,
    /// `Δ1 < √(Δ2/2)`: energy-harvesting constraints shape the region.
    HarvestBound,
}

impl Branch {
    pub fn tag(&self) -> &'static str {
        match self {
            Branch::OscCeiling => "osc_ceiling",
            Branch::DecodeBound => "decode_bound",
            Branch::HarvestBound => "harvest_bound",
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Region parameters of the relaying success event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deltas<T> {
    /// Minimum relay-link gain for the relay to decode.
    pub delta1: T,
    /// Bound on `x(x+y)` and `y(x+y)` for the terminals to decode the relay.
    pub delta2: T,
    /// `Δ2/Δ1 - Δ1`, where the curved boundary meets `y = Δ1`. Only
    /// meaningful for [`Branch::HarvestBound`].
    pub phi: T,
}

impl<T: Real> Deltas<T> {
    /// `√(Δ2/2)`, where the two curves cross the diagonal.
    pub fn knee(&self) -> T {
        (self.delta2 / T::of(2.0)).sqrt()
    }

    pub fn branch(&self) -> Branch {
        if self.delta1 >= self.knee() {
            Branch::DecodeBound
        } else {
            Branch::HarvestBound
        }
    }
}

/// System outage probability with its factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageBreakdown<T> {
    pub p_out: T,
    /// Direct-link outage probability.
    pub p1: T,
    /// Relaying-phase success probability.
    pub p2: T,
    pub branch: Branch,
    /// `None` at the ceiling, where the region parameters are undefined.
    pub deltas: Option<Deltas<T>>,
}

/// SNDR ceiling `1/(k1²+k2²)`, `+∞` for ideal hardware.
pub fn osc_threshold<T: Real>(hw: &HardwareProfile<T>) -> T {
    hw.osc_threshold()
}

/// `1 - κγ_th`, or `None` at or above the ceiling.
fn headroom<T: Real>(cfg: &SystemConfig<T>) -> Option<T> {
    let gamma_th = cfg.sndr_threshold();
    if gamma_th >= osc_threshold(cfg.hardware()) {
        return None;
    }
    let h = T::one() - cfg.hardware().distortion() * gamma_th;
    (h > T::zero()).then_some(h)
}

pub fn is_ceiling<T: Real>(cfg: &SystemConfig<T>) -> bool {
    headroom(cfg).is_none()
}

/// `Δ1`, `Δ2` and `Φ`; errors at the ceiling.
pub fn deltas<T: Real>(cfg: &SystemConfig<T>) -> Result<Deltas<T>> {
    let h = headroom(cfg).ok_or_else(|| Error::Branch {
        branch: "deltas",
        reason: "SNDR threshold is at or above the system ceiling".into(),
    })?;
    let gamma_th = cfg.sndr_threshold();
    let rho = cfg.input_snr();
    let delta1 = gamma_th / ((T::one() - cfg.beta()) * h * rho);
    let delta2 = gamma_th / (cfg.eta() * cfg.beta() * h * rho);
    Ok(Deltas {
        delta1,
        delta2,
        phi: delta2 / delta1 - delta1,
    })
}

/// Positive root `y` of `y (t + y) = Δ2`, i.e. `(-t + √(t² + 4Δ2)) / 2`.
pub fn q_curve<T: Real>(t: T, delta2: T) -> T {
    // rationalized form avoids cancellation for t >> √Δ2
    let two = T::of(2.0);
    two * delta2 / (t + (t * t + T::of(4.0) * delta2).sqrt())
}

/// Direct-link outage probability.
pub fn p1<T: Real>(cfg: &SystemConfig<T>) -> T {
    match headroom(cfg) {
        None => T::one(),
        Some(h) => {
            let ch = cfg.channels();
            let u = cfg.sndr_threshold() / (ch.theta_d() * cfg.input_snr() * h);
            clamp01(reg_lower(ch.m_d(), u))
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Link<T> {
    m: u32,
    theta: T,
}

fn relay_links<T: Real>(cfg: &SystemConfig<T>) -> (Link<T>, Link<T>) {
    let ch = cfg.channels();
    (
        Link {
            m: ch.m_a(),
            theta: ch.theta_a(),
        },
        Link {
            m: ch.m_b(),
            theta: ch.theta_b(),
        },
    )
}

/// `ln` of the weight shared by the `l`-sums: `(1/Γ(m_x)) (1/θ_x)^{m_x} (1/θ_y)^l / l! · μ^{-(m_x+l)}`
/// with `μ = 1/θ_x + 1/θ_y`.
fn ln_cross_weight<T: Real>(x: Link<T>, y: Link<T>, l: u32) -> T {
    let sum = x.theta + y.theta;
    let wx = y.theta / sum; // (1/θ_x) / μ
    let wy = x.theta / sum; // (1/θ_y) / μ
    T::of(x.m as f64) * wx.ln() + T::of(l as f64) * wy.ln()
        - ln_factorial::<T>(x.m - 1)
        - ln_factorial::<T>(l)
}

fn rate_sum<T: Real>(x: Link<T>, y: Link<T>) -> T {
    T::one() / x.theta + T::one() / y.theta
}

/// `∫_lower^∞ f_X(x) [F_Y(x) - F_Y(floor)] dx` for `lower >= floor`.
fn tail_part<T: Real>(lower: T, floor: T, x: Link<T>, y: Link<T>) -> T {
    let mu = rate_sum(x, y);
    let upper_x = reg_upper(x.m, lower / x.theta);
    let series = (0..y.m).fold(T::zero(), |acc, l| {
        let ln_term = ln_cross_weight(x, y, l) + ln_upper_gamma(x.m + l, lower * mu);
        acc + ln_term.exp()
    });
    let xi1 = upper_x - series;
    let xi2 = reg_lower(y.m, floor / y.theta) * (T::one() - reg_lower(x.m, lower / x.theta));
    xi1 - xi2
}

/// `∫_knee^Φ f_X(x) [F_Y(x) - F_Y(Q(x))] dx`, the curved-boundary piece.
fn curved_part<T: Real>(rule: &QuadratureRule<T>, d: &Deltas<T>, x: Link<T>, y: Link<T>) -> T {
    let knee = d.knee();
    let mx = T::of(x.m as f64);
    let ln_norm = ln_factorial::<T>(x.m - 1) + mx * x.theta.ln();
    // quadrature of f_X(t) e^{-Q/θ_y} Σ_l (Q/θ_y)^l / l!
    let xi3 = rule.integrate(|t| {
        let q = q_curve(t, d.delta2);
        let base = (mx - T::one()) * t.ln() - t / x.theta - q / y.theta - ln_norm;
        (0..y.m).fold(T::zero(), |acc, l| {
            let lf = T::of(l as f64);
            let ln_term = base + lf * q.ln() - lf * y.theta.ln() - ln_factorial::<T>(l);
            acc + ln_term.exp()
        })
    });
    let mu = rate_sum(x, y);
    let xi4 = (0..y.m).fold(T::zero(), |acc, l| {
        let inc = lower_gamma_increment(x.m + l, knee * mu, d.phi * mu);
        acc + ln_cross_weight(x, y, l).exp() * inc
    });
    xi3 - xi4
}

fn clamp01<T: Real>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

/// Relative slack admitted by the explicit-branch entry points, so both
/// closed forms can be evaluated on the boundary itself.
const BOUNDARY_RTOL: f64 = 1e-9;

/// `P2` in the decode-bound region `Δ1 >= √(Δ2/2)`.
pub fn p2_case_a<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    let d = deltas(cfg)?;
    if d.delta1 < d.knee() * T::of(1.0 - BOUNDARY_RTOL) {
        return Err(Error::Branch {
            branch: Branch::DecodeBound.tag(),
            reason: format!("requires Δ1 >= √(Δ2/2), got Δ1 = {}, √(Δ2/2) = {}", d.delta1, d.knee()),
        });
    }
    Ok(p2_decode_bound(cfg, &d))
}

fn p2_decode_bound<T: Real>(cfg: &SystemConfig<T>, d: &Deltas<T>) -> T {
    let (a, b) = relay_links(cfg);
    clamp01(tail_part(d.delta1, d.delta1, a, b) + tail_part(d.delta1, d.delta1, b, a))
}

/// `P2` in the harvest-bound region `Δ1 < √(Δ2/2)`, using the configured
/// quadrature order.
pub fn p2_case_b<T: Real>(cfg: &SystemConfig<T>) -> Result<T> {
    let d = deltas(cfg)?;
    if d.delta1 >= d.knee() * T::of(1.0 + BOUNDARY_RTOL) {
        return Err(Error::Branch {
            branch: Branch::HarvestBound.tag(),
            reason: format!("requires Δ1 < √(Δ2/2), got Δ1 = {}, √(Δ2/2) = {}", d.delta1, d.knee()),
        });
    }
    p2_harvest_bound(cfg, &d)
}

fn p2_harvest_bound<T: Real>(cfg: &SystemConfig<T>, d: &Deltas<T>) -> Result<T> {
    let (a, b) = relay_links(cfg);
    let knee = d.knee();
    // on the boundary itself Φ can round a hair below the knee
    let phi = d.phi.max(knee);
    let d = Deltas { phi, ..*d };
    let rule = QuadratureRule::chebyshev(cfg.quadrature_order(), knee, phi)?;
    let total = curved_part(&rule, &d, a, b)
        + tail_part(phi, d.delta1, a, b)
        + curved_part(&rule, &d, b, a)
        + tail_part(phi, d.delta1, b, a);
    Ok(clamp01(total))
}

/// Relaying-phase success probability; zero at the ceiling.
pub fn p2<T: Real>(cfg: &SystemConfig<T>) -> T {
    system_outage(cfg).p2
}

/// System outage probability and its components.
pub fn system_outage<T: Real>(cfg: &SystemConfig<T>) -> OutageBreakdown<T> {
    let d = match deltas(cfg) {
        Ok(d) => d,
        Err(_) => {
            return OutageBreakdown {
                p_out: T::one(),
                p1: T::one(),
                p2: T::zero(),
                branch: Branch::OscCeiling,
                deltas: None,
            }
        }
    };
    let branch = d.branch();
    let p2 = match branch {
        Branch::DecodeBound => p2_decode_bound(cfg, &d),
        // the rule interval is finite and ordered whenever Δ1 < √(Δ2/2)
        _ => p2_harvest_bound(cfg, &d).expect("valid quadrature interval"),
    };
    let p1 = p1(cfg);
    OutageBreakdown {
        p_out: clamp01(p1 * (T::one() - p2)),
        p1,
        p2,
        branch,
        deltas: Some(d),
    }
}

/// Diversity order: `m_d + min(m_a, m_b)` below the ceiling, else 0.
pub fn diversity_gain<T: Real>(cfg: &SystemConfig<T>) -> u32 {
    if is_ceiling(cfg) {
        0
    } else {
        let ch = cfg.channels();
        ch.m_d() + ch.m_a().min(ch.m_b())
    }
}

/// `R_th (1 - P_out) / (2 T P_o / 3)` for a given outage probability.
pub fn energy_efficiency_with<T: Real>(cfg: &SystemConfig<T>, p_out: T) -> T {
    let p = cfg.params();
    p.target_rate * (T::one() - p_out) / (T::of(2.0) * p.block_time * p.tx_power / T::of(3.0))
}

/// Energy efficiency with the closed-form outage probability.
pub fn energy_efficiency<T: Real>(cfg: &SystemConfig<T>) -> T {
    energy_efficiency_with(cfg, system_outage(cfg).p_out)
}

/// Two-point log-log slope of the closed-form `P_out` against `ρ`.
pub fn outage_slope<T: Real>(cfg: &SystemConfig<T>, low_db: T, high_db: T) -> Result<T> {
    let lo = system_outage(&cfg.with_input_snr_db(low_db)?).p_out;
    let hi = system_outage(&cfg.with_input_snr_db(high_db)?).p_out;
    log_log_slope(lo, hi, low_db, high_db)
}

/// `(log y1 - log y2) / (log 10^{x1/10} - log 10^{x2/10})`.
pub fn log_log_slope<T: Real>(y1: T, y2: T, x1_db: T, x2_db: T) -> Result<T> {
    if !(y1 > T::zero() && y2 > T::zero()) {
        return Err(Error::Degenerate(format!(
            "log-log slope needs positive probabilities, got {y1} and {y2}"
        )));
    }
    if x1_db == x2_db {
        return Err(Error::Degenerate("slope needs two distinct SNR points".into()));
    }
    if y1 == y2 {
        return Ok(T::zero());
    }
    let ten = T::of(10.0);
    Ok((y1.ln() - y2.ln()) / ((x1_db - x2_db) / ten * ten.ln()))
}

/// Result of the PS-ratio search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalBeta<T> {
    pub beta: T,
    pub p_out: T,
    /// `(β, P_out)` at every grid point.
    pub grid: Vec<(T, T)>,
}

/// Minimizes `P_out` over `β` on a uniform grid of `resolution` points over
/// `[0.005, 0.995]`, then refines the bracket around the grid minimum by
/// golden-section search. Ties go to the smaller `β`.
pub fn optimal_beta<T: Real>(cfg: &SystemConfig<T>, resolution: usize) -> Result<OptimalBeta<T>> {
    if resolution < 3 {
        return Err(Error::InvalidParameter {
            name: "resolution",
            reason: format!("need at least 3 grid points, got {resolution}"),
        });
    }
    let lo = T::of(BETA_SEARCH_MIN);
    let step = T::of((BETA_SEARCH_MAX - BETA_SEARCH_MIN) / (resolution - 1) as f64);
    let outage_at = |beta: T| -> Result<T> { Ok(system_outage(&cfg.with_beta(beta)?).p_out) };

    let grid = (0..resolution)
        .map(|i| {
            let beta = lo + step * T::of(i as f64);
            outage_at(beta).map(|p| (beta, p))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = grid_argmin(&grid);
    let (mut beta, mut p_out) = grid[best];

    let bracketed = best > 0
        && best + 1 < grid.len()
        && grid[best - 1].1 > p_out
        && grid[best + 1].1 > p_out;
    if bracketed {
        let (b, p) = golden_section(grid[best - 1].0, grid[best + 1].0, T::of(BETA_REFINE_WIDTH), &outage_at)?;
        if p < p_out {
            beta = b;
            p_out = p;
        }
    }
    Ok(OptimalBeta { beta, p_out, grid })
}

/// First index of the smallest value.
pub fn grid_argmin<T: Real>(grid: &[(T, T)]) -> usize {
    let mut best = 0;
    for (i, &(_, p)) in grid.iter().enumerate().skip(1) {
        if p < grid[best].1 {
            best = i;
        }
    }
    best
}

fn golden_section<T: Real>(
    mut a: T,
    mut b: T,
    width: T,
    f: &impl Fn(T) -> Result<T>,
) -> Result<(T, T)> {
    let inv_phi = T::of((5.0_f64.sqrt() - 1.0) / 2.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > width {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}
