//! Floating-point abstraction shared by every module.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};
use rand::Rng;
use rand_distr::{Distribution, Exp1};

/// Real scalar the analysis is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal or intermediate into `Self`.
    fn of(x: f64) -> Self;

    /// Widens to `f64` for reporting.
    fn to_f64_lossy(self) -> f64;

    /// Draws one unit-mean exponential variate.
    fn sample_exp1<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Largest `n` with `n!` finite in this type.
    const MAX_FACTORIAL: u32;
}

impl Real for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }

    #[inline]
    fn sample_exp1<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Exp1.sample(rng)
    }

    const MAX_FACTORIAL: u32 = 34;
}

impl Real for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }

    #[inline]
    fn sample_exp1<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Exp1.sample(rng)
    }

    const MAX_FACTORIAL: u32 = 170;
}
