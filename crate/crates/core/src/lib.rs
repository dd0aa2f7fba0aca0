//! System outage probability, diversity order and energy efficiency of a
//! power-splitting SWIPT two-way decode-and-forward relay network with
//! transceiver hardware impairments over Nakagami-m fading.
//!
//! Two terminals `S_a`, `S_b` exchange messages over three phases: each
//! broadcasts once, and an energy-harvesting relay that has decoded both
//! messages forwards their network-coded combination. Terminals keep the
//! better of the direct and relayed signals.
//!
//! * [`analytics`] evaluates the closed-form outage probability and its
//!   derived quantities.
//! * [`montecarlo`] estimates the same probabilities by sampling fading
//!   realizations through [`linkmodel`]. It shares no algebra with
//!   `analytics`, so each checks the other.
//!
//! All math is generic over [`Real`] (`f32` or `f64`). The `*64` aliases
//! below are the double-precision instantiations used by the CLI and the
//! acceptance tests.

pub mod analytics;
pub mod channel;
mod error;
pub mod linkmodel;
pub mod montecarlo;
pub mod numerics;
mod scalar;

pub use analytics::{Branch, Deltas, OptimalBeta, OutageBreakdown};
pub use channel::{ChannelDraw, ChannelParams};
pub use error::{Error, Result};
pub use linkmodel::{HardwareProfile, LinkSndrs, SystemConfig, SystemParams};
pub use montecarlo::{LinkEvent, SimEstimate};
pub use numerics::QuadratureRule;
pub use scalar::Real;

pub type ChannelParams64 = ChannelParams<f64>;
pub type ChannelDraw64 = ChannelDraw<f64>;
pub type HardwareProfile64 = HardwareProfile<f64>;
pub type SystemParams64 = SystemParams<f64>;
pub type SystemConfig64 = SystemConfig<f64>;
pub type OutageBreakdown64 = OutageBreakdown<f64>;
pub type Deltas64 = Deltas<f64>;
pub type QuadratureRule64 = QuadratureRule<f64>;

pub type ChannelParams32 = ChannelParams<f32>;
pub type HardwareProfile32 = HardwareProfile<f32>;
pub type SystemParams32 = SystemParams<f32>;
pub type SystemConfig32 = SystemConfig<f32>;
pub type OutageBreakdown32 = OutageBreakdown<f32>;
