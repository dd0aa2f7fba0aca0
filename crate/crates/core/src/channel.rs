//! Gamma-distributed channel power gains under Nakagami-m fading.
//!
//! With amplitude `|h| ~ Nakagami(m, Ω)` the power gain `|h|²` is
//! `Gamma(m, θ = Ω/m)`. Shapes are restricted to integers, so sampling is
//! exact as a sum of `m` exponential variates (Erlang).

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::numerics::{ln_factorial, reg_lower};
use crate::scalar::Real;

/// Shape parameters and average powers of the three links.
///
/// `a` is the `S_a`–relay link, `b` the `S_b`–relay link and `d` the direct
/// `S_a`–`S_b` link. Channels are reciprocal, so each link is used in both
/// directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams<T> {
    m_a: u32,
    m_b: u32,
    m_d: u32,
    omega_a: T,
    omega_b: T,
    omega_d: T,
}

impl<T: Real> ChannelParams<T> {
    /// Shapes `(m_a, m_b, m_d)` and average powers `(Ω_a, Ω_b, Ω_d)`.
    pub fn new(shapes: (u32, u32, u32), omegas: (T, T, T)) -> Result<Self> {
        let (m_a, m_b, m_d) = shapes;
        for (name, m) in [("m_a", m_a), ("m_b", m_b), ("m_d", m_d)] {
            if m == 0 {
                return Err(invalid(name, "Nakagami shape must be an integer >= 1"));
            }
        }
        let (omega_a, omega_b, omega_d) = omegas;
        for (name, w) in [("omega_a", omega_a), ("omega_b", omega_b), ("omega_d", omega_d)] {
            if !(w > T::zero()) || !w.is_finite() {
                return Err(invalid(name, format!("average power must be finite and > 0, got {w}")));
            }
        }
        Ok(Self {
            m_a,
            m_b,
            m_d,
            omega_a,
            omega_b,
            omega_d,
        })
    }

    /// Average powers from distances and path-loss exponents: `Ω = d^{-α}`.
    pub fn from_geometry(
        shapes: (u32, u32, u32),
        distances: (T, T, T),
        relay_exponent: T,
        direct_exponent: T,
    ) -> Result<Self> {
        let (d_ar, d_br, d_ab) = distances;
        for (name, d) in [("d_ar", d_ar), ("d_br", d_br), ("d_ab", d_ab)] {
            if !(d > T::zero()) || !d.is_finite() {
                return Err(invalid(name, format!("distance must be finite and > 0, got {d}")));
            }
        }
        Self::new(
            shapes,
            (
                d_ar.powf(-relay_exponent),
                d_br.powf(-relay_exponent),
                d_ab.powf(-direct_exponent),
            ),
        )
    }

    pub fn m_a(&self) -> u32 {
        self.m_a
    }
    pub fn m_b(&self) -> u32 {
        self.m_b
    }
    pub fn m_d(&self) -> u32 {
        self.m_d
    }
    pub fn omega_a(&self) -> T {
        self.omega_a
    }
    pub fn omega_b(&self) -> T {
        self.omega_b
    }
    pub fn omega_d(&self) -> T {
        self.omega_d
    }
    pub fn theta_a(&self) -> T {
        self.omega_a / T::of(self.m_a as f64)
    }
    pub fn theta_b(&self) -> T {
        self.omega_b / T::of(self.m_b as f64)
    }
    pub fn theta_d(&self) -> T {
        self.omega_d / T::of(self.m_d as f64)
    }

    /// Exchanges the roles of the two terminal–relay links.
    pub fn swapped(&self) -> Self {
        Self {
            m_a: self.m_b,
            m_b: self.m_a,
            omega_a: self.omega_b,
            omega_b: self.omega_a,
            ..*self
        }
    }
}

/// One fading realization of the three power gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw<T> {
    /// `|h_ar|²`
    pub x: T,
    /// `|h_br|²`
    pub y: T,
    /// `|h_ab|²`
    pub z: T,
}

fn check_density_args<T: Real>(v: T, m: u32, theta: T) -> Result<()> {
    if !(v >= T::zero()) {
        return Err(Error::Domain(format!("gain must be >= 0, got {v}")));
    }
    if m == 0 {
        return Err(Error::Domain("shape must be >= 1".into()));
    }
    if !(theta > T::zero()) || !theta.is_finite() {
        return Err(Error::Domain(format!("scale must be finite and > 0, got {theta}")));
    }
    Ok(())
}

/// Gamma density `v^{m-1} e^{-v/θ} / (Γ(m) θ^m)`.
pub fn gamma_pdf<T: Real>(v: T, m: u32, theta: T) -> Result<T> {
    check_density_args(v, m, theta)?;
    if v.is_infinite() {
        return Ok(T::zero());
    }
    if v == T::zero() {
        return Ok(if m == 1 { T::one() / theta } else { T::zero() });
    }
    let mf = T::of(m as f64);
    let ln_pdf = (mf - T::one()) * v.ln() - v / theta - ln_factorial::<T>(m - 1) - mf * theta.ln();
    Ok(ln_pdf.exp())
}

/// Gamma distribution function `γ(m, v/θ) / Γ(m)`.
pub fn gamma_cdf<T: Real>(v: T, m: u32, theta: T) -> Result<T> {
    check_density_args(v, m, theta)?;
    if v.is_infinite() {
        return Ok(T::one());
    }
    Ok(reg_lower(m, v / theta))
}

/// Erlang variate: sum of `m` exponentials of scale `θ`.
pub fn sample_erlang<T: Real, R: Rng + ?Sized>(rng: &mut R, m: u32, theta: T) -> T {
    let mut acc = T::zero();
    for _ in 0..m {
        acc = acc + T::sample_exp1(rng);
    }
    acc * theta
}

/// Draws `(X, Y, Z)` independently from their gamma laws.
pub fn sample_draw<T: Real, R: Rng + ?Sized>(rng: &mut R, params: &ChannelParams<T>) -> ChannelDraw<T> {
    ChannelDraw {
        x: sample_erlang(rng, params.m_a, params.theta_a()),
        y: sample_erlang(rng, params.m_b, params.theta_b()),
        z: sample_erlang(rng, params.m_d, params.theta_d()),
    }
}
