//! Instantaneous link model: SNDRs and harvested relay power for one fading
//! realization.
//!
//! Hardware impairments enter every SNDR the same way. With aggregate
//! distortion `κ = k1² + k2²` and an effective signal-to-noise product `g`,
//! each link delivers `g / (κ g + 1)`, which stays strictly below the ceiling
//! `1/κ` however strong the channel is.

use crate::channel::{ChannelDraw, ChannelParams};
use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Converts a power in dBm to watts.
pub fn dbm_to_watts<T: Real>(dbm: T) -> T {
    T::of(10.0).powf((dbm - T::of(30.0)) / T::of(10.0))
}

/// Converts a power in watts to dBm.
pub fn watts_to_dbm<T: Real>(watts: T) -> T {
    T::of(10.0) * watts.log10() + T::of(30.0)
}

pub fn db_to_linear<T: Real>(db: T) -> T {
    T::of(10.0).powf(db / T::of(10.0))
}

/// Transceiver impairment levels, shared by every node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardwareProfile<T> {
    k1: T,
    k2: T,
}

impl<T: Real> HardwareProfile<T> {
    /// Transmitter level `k1`, receiver level `k2`. Both must be `>= 0`.
    pub fn new(k1: T, k2: T) -> Result<Self> {
        for (name, k) in [("k1", k1), ("k2", k2)] {
            if !(k >= T::zero()) || !k.is_finite() {
                return Err(invalid(name, format!("impairment level must be finite and >= 0, got {k}")));
            }
        }
        Ok(Self { k1, k2 })
    }

    /// `k1 = k2 = k`.
    pub fn symmetric(k: T) -> Result<Self> {
        Self::new(k, k)
    }

    pub fn ideal() -> Self {
        Self {
            k1: T::zero(),
            k2: T::zero(),
        }
    }

    pub fn k1(&self) -> T {
        self.k1
    }

    pub fn k2(&self) -> T {
        self.k2
    }

    /// `k1² + k2²`.
    pub fn distortion(&self) -> T {
        self.k1 * self.k1 + self.k2 * self.k2
    }

    /// SNDR ceiling `1 / (k1² + k2²)`; `+∞` for ideal hardware.
    pub fn osc_threshold(&self) -> T {
        let kappa = self.distortion();
        if kappa == T::zero() {
            T::infinity()
        } else {
            T::one() / kappa
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.distortion() == T::zero()
    }
}

/// Unvalidated system parameters. Turn into a [`SystemConfig`] to use them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    /// Transmit power of each terminal `P_o`, watts.
    pub tx_power: T,
    /// Noise power `σ²`, watts.
    pub noise_power: T,
    /// Energy conversion efficiency `η`.
    pub eta: T,
    /// Power-splitting ratio `β` (fraction routed to harvesting).
    pub beta: T,
    /// Block duration `T`, seconds.
    pub block_time: T,
    /// Target rate `R_th`, bit/s/Hz.
    pub target_rate: T,
    /// Gauss–Chebyshev order `N`.
    pub quadrature_order: usize,
    pub hardware: HardwareProfile<T>,
    pub channels: ChannelParams<T>,
}

impl<T: Real> SystemParams<T> {
    /// Reference scenario: η = 0.6, β = 0.9, T = 1 s, k1 = k2 = 0.1,
    /// distances 5/5/10 m with exponents 2.7 (relay) and 3 (direct),
    /// σ² = -50 dBm, shapes {2, 2, 1}, P_o = 10 dBm, R_th = 1, N = 16.
    pub fn reference() -> Self {
        Self {
            tx_power: dbm_to_watts(T::of(10.0)),
            noise_power: dbm_to_watts(T::of(-50.0)),
            eta: T::of(0.6),
            beta: T::of(0.9),
            block_time: T::one(),
            target_rate: T::one(),
            quadrature_order: 16,
            hardware: HardwareProfile::symmetric(T::of(0.1)).expect("valid constant"),
            channels: ChannelParams::from_geometry(
                (2, 2, 1),
                (T::of(5.0), T::of(5.0), T::of(10.0)),
                T::of(2.7),
                T::of(3.0),
            )
            .expect("valid constant"),
        }
    }

    pub fn validate(self) -> Result<SystemConfig<T>> {
        SystemConfig::new(self)
    }
}

/// Validated system configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig<T> {
    params: SystemParams<T>,
}

fn open_unit<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v > T::zero() && v < T::one() {
        Ok(())
    } else {
        Err(invalid(name, format!("must lie in (0, 1), got {v}")))
    }
}

fn positive<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

impl<T: Real> SystemConfig<T> {
    pub fn new(params: SystemParams<T>) -> Result<Self> {
        positive("tx_power", params.tx_power)?;
        positive("noise_power", params.noise_power)?;
        open_unit("eta", params.eta)?;
        open_unit("beta", params.beta)?;
        positive("block_time", params.block_time)?;
        positive("target_rate", params.target_rate)?;
        if params.quadrature_order == 0 {
            return Err(invalid("quadrature_order", "must be >= 1"));
        }
        // Re-run the component constructors so hand-built params are checked too.
        let hw = params.hardware;
        HardwareProfile::new(hw.k1(), hw.k2())?;
        let ch = params.channels;
        ChannelParams::new(
            (ch.m_a(), ch.m_b(), ch.m_d()),
            (ch.omega_a(), ch.omega_b(), ch.omega_d()),
        )?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &SystemParams<T> {
        &self.params
    }

    /// Copies the parameters, applies `edit`, and revalidates.
    pub fn with(&self, edit: impl FnOnce(&mut SystemParams<T>)) -> Result<Self> {
        let mut p = self.params;
        edit(&mut p);
        Self::new(p)
    }

    pub fn with_beta(&self, beta: T) -> Result<Self> {
        self.with(|p| p.beta = beta)
    }

    pub fn with_tx_power_dbm(&self, dbm: T) -> Result<Self> {
        self.with(|p| p.tx_power = dbm_to_watts(dbm))
    }

    /// Sets `P_o` so that `ρ = P_o / σ²` equals `db` decibels.
    pub fn with_input_snr_db(&self, db: T) -> Result<Self> {
        self.with(|p| p.tx_power = p.noise_power * db_to_linear(db))
    }

    pub fn with_channels(&self, channels: ChannelParams<T>) -> Result<Self> {
        self.with(|p| p.channels = channels)
    }

    pub fn with_hardware(&self, hardware: HardwareProfile<T>) -> Result<Self> {
        self.with(|p| p.hardware = hardware)
    }

    /// Sets `R_th` so that the SNDR threshold equals `gamma_th`.
    pub fn with_sndr_threshold(&self, gamma_th: T) -> Result<Self> {
        positive("gamma_th", gamma_th)?;
        self.with(|p| p.target_rate = p.block_time * (T::one() + gamma_th).log2() / T::of(3.0))
    }

    /// Input SNR `ρ = P_o / σ²`.
    pub fn input_snr(&self) -> T {
        self.params.tx_power / self.params.noise_power
    }

    /// SNDR threshold `2^{3 R_th / T} - 1` (three phases per block).
    pub fn sndr_threshold(&self) -> T {
        T::of(2.0).powf(T::of(3.0) * self.params.target_rate / self.params.block_time) - T::one()
    }

    pub fn hardware(&self) -> &HardwareProfile<T> {
        &self.params.hardware
    }

    pub fn channels(&self) -> &ChannelParams<T> {
        &self.params.channels
    }

    pub fn beta(&self) -> T {
        self.params.beta
    }

    pub fn eta(&self) -> T {
        self.params.eta
    }

    pub fn quadrature_order(&self) -> usize {
        self.params.quadrature_order
    }
}

/// `g / (κ g + 1)`; exactly `g` for ideal hardware.
#[inline]
fn impaired<T: Real>(gain: T, hw: &HardwareProfile<T>) -> T {
    gain / (hw.distortion() * gain + T::one())
}

/// Direct-link SNDR `ρz / ((k1²+k2²) ρz + 1)`.
pub fn sndr_direct<T: Real>(z: T, rho: T, hw: &HardwareProfile<T>) -> T {
    impaired(rho * z, hw)
}

/// SNDR for decoding a terminal's message at the relay after power splitting.
pub fn sndr_terminal_to_relay<T: Real>(x: T, rho: T, beta: T, hw: &HardwareProfile<T>) -> T {
    impaired((T::one() - beta) * rho * x, hw)
}

/// Relay transmit power `ηβ P_o (x + y)` from the energy harvested over both
/// broadcast phases.
pub fn relay_power<T: Real>(x: T, y: T, tx_power: T, eta: T, beta: T) -> T {
    eta * beta * tx_power * (x + y)
}

/// SNDR at terminal `i` in the relaying phase, where `gain_i` is that
/// terminal's own relay-link gain and `x`, `y` are both relay-link gains.
pub fn sndr_relay_to_terminal<T: Real>(
    gain_i: T,
    x: T,
    y: T,
    rho: T,
    eta: T,
    beta: T,
    hw: &HardwareProfile<T>,
) -> T {
    impaired(eta * beta * rho * gain_i * (x + y), hw)
}

/// The five link SNDRs of one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSndrs<T> {
    /// `γ_ab = γ_ba` (reciprocal direct link).
    pub direct: T,
    /// `γ_ar`: relay decoding `x_a`.
    pub a_to_relay: T,
    /// `γ_br`: relay decoding `x_b`.
    pub b_to_relay: T,
    /// `γ_ra`: `S_a` receiving the relay broadcast.
    pub relay_to_a: T,
    /// `γ_rb`: `S_b` receiving the relay broadcast.
    pub relay_to_b: T,
}

impl<T: Real> LinkSndrs<T> {
    /// Selection-combined SNDR at `S_a`: `max{γ_ba, min{γ_br, γ_ra}}`.
    pub fn gamma_a(&self) -> T {
        self.direct.max(self.b_to_relay.min(self.relay_to_a))
    }

    /// Selection-combined SNDR at `S_b`: `max{γ_ab, min{γ_ar, γ_rb}}`.
    pub fn gamma_b(&self) -> T {
        self.direct.max(self.a_to_relay.min(self.relay_to_b))
    }

    /// The relay decodes both messages and both terminals decode the
    /// network-coded broadcast.
    pub fn relay_joint_success(&self, gamma_th: T) -> bool {
        self.a_to_relay > gamma_th
            && self.b_to_relay > gamma_th
            && self.relay_to_a > gamma_th
            && self.relay_to_b > gamma_th
    }

    pub fn direct_outage(&self, gamma_th: T) -> bool {
        self.direct < gamma_th
    }

    /// System outage: the direct link fails and the joint relay event fails.
    pub fn system_outage(&self, gamma_th: T) -> bool {
        self.direct_outage(gamma_th) && !self.relay_joint_success(gamma_th)
    }

    pub fn max(&self) -> T {
        self.direct
            .max(self.a_to_relay)
            .max(self.b_to_relay)
            .max(self.relay_to_a)
            .max(self.relay_to_b)
    }
}

/// All link SNDRs for one draw under `cfg`.
pub fn end_to_end_sndrs<T: Real>(draw: &ChannelDraw<T>, cfg: &SystemConfig<T>) -> LinkSndrs<T> {
    let rho = cfg.input_snr();
    let p = cfg.params();
    let hw = &p.hardware;
    LinkSndrs {
        direct: sndr_direct(draw.z, rho, hw),
        a_to_relay: sndr_terminal_to_relay(draw.x, rho, p.beta, hw),
        b_to_relay: sndr_terminal_to_relay(draw.y, rho, p.beta, hw),
        relay_to_a: sndr_relay_to_terminal(draw.x, draw.x, draw.y, rho, p.eta, p.beta, hw),
        relay_to_b: sndr_relay_to_terminal(draw.y, draw.x, draw.y, rho, p.eta, p.beta, hw),
    }
}
