//! Scalar abstractions.
//!
//! Probabilities, entropies and capacities are computed over any [`Real`]
//! (`f32` or `f64`); the slow-growing integer functions run over any
//! [`Count`] (`u64`, `u128` or an arbitrary-precision [`BigUint`]).

use std::fmt::{Debug, Display};

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{CheckedAdd, CheckedMul, Float, FromPrimitive, ToPrimitive, Unsigned};

pub trait Real:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Tolerance for stochasticity and symmetry checks.
    const TOLERANCE: f64;
    /// Slack added to closed-interval comparisons against rounded products.
    const SLACK: f64;
    /// Posterior entries at or below this are treated as zero.
    const ZERO: f64;

    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite conversion")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite conversion")
    }
}

impl Real for f64 {
    const TOLERANCE: f64 = 1e-9;
    const SLACK: f64 = 1e-12;
    const ZERO: f64 = 1e-12;
}

impl Real for f32 {
    const TOLERANCE: f64 = 1e-5;
    const SLACK: f64 = 1e-6;
    const ZERO: f64 = 1e-7;
}

/// Nonnegative integers with exact square root and bit length.
pub trait Count:
    Clone
    + Ord
    + Debug
    + Display
    + Unsigned
    + FromPrimitive
    + ToPrimitive
    + Roots
    + CheckedAdd
    + CheckedMul
{
    /// Number of significant bits; zero for zero.
    fn bit_length(&self) -> u64;

    /// `2^e`, or `None` when it does not fit.
    fn pow2(e: u64) -> Option<Self>;

    fn from_u64(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("u64 fits every Count")
    }

    /// `⌈log₂ n⌉` for `n ≥ 1`, zero for `n ≤ 1`.
    fn ceil_log2(&self) -> Self {
        if *self <= Self::one() {
            return Self::zero();
        }
        let pred = self.clone() - Self::one();
        <Self as Count>::from_u64(pred.bit_length())
    }
}

impl Count for u64 {
    fn bit_length(&self) -> u64 {
        (u64::BITS - self.leading_zeros()) as u64
    }

    fn pow2(e: u64) -> Option<Self> {
        (e < 64).then(|| 1u64 << e)
    }
}

impl Count for u128 {
    fn bit_length(&self) -> u64 {
        (u128::BITS - self.leading_zeros()) as u64
    }

    fn pow2(e: u64) -> Option<Self> {
        (e < 128).then(|| 1u128 << e)
    }
}

impl Count for BigUint {
    fn bit_length(&self) -> u64 {
        self.bits()
    }

    fn pow2(e: u64) -> Option<Self> {
        Some(BigUint::from(1u8) << e)
    }
}
