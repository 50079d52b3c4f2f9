//! Mass arithmetic.
//!
//! Weights and quotas that are decimals with at most six fraction digits are
//! compared exactly as integer multiples of `1e-6`. Anything else falls back
//! to floating point, where `have >= need - MASS_TOL` counts as covered.

use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::{Add, AddAssign, Sub, SubAssign};

/// Exact masses are integer multiples of `1 / UNIT_SCALE`.
pub const UNIT_SCALE: i64 = 1_000_000;

/// Float-mode tolerance for `mass >= quota` tests.
pub const MASS_TOL: f64 = 1e-12;

/// Residual threshold used by float flows.
pub(crate) const FLOW_EPS: f64 = 1e-14;

/// Returns `x` in units of `1e-6` when `x` is such a decimal.
pub fn decimal_units(x: f64) -> Option<i64> {
    if !x.is_finite() || x.abs() > 1e9 {
        return None;
    }
    let scaled = x * UNIT_SCALE as f64;
    let r = libm::round(scaled);
    if (scaled - r).abs() <= 1e-6 {
        Some(r as i64)
    } else {
        None
    }
}

pub fn units_to_f64(u: i64) -> f64 {
    u as f64 / UNIT_SCALE as f64
}

/// Scalar used for masses in exact (`i64`) or float (`f64`) mode.
pub trait Mass:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + AddAssign
    + SubAssign
    + Debug
    + Send
    + Sync
    + 'static
{
    const ZERO: Self;
    /// `have >= need`, tolerant in favor of feasibility in float mode.
    fn covers(have: Self, need: Self) -> bool;
    /// Strictly positive residual (float mode ignores roundoff dust).
    fn is_positive(self) -> bool;
    fn min_of(self, other: Self) -> Self;
    fn to_f64(self) -> f64;
}

impl Mass for i64 {
    const ZERO: Self = 0;
    fn covers(have: Self, need: Self) -> bool {
        have >= need
    }
    fn is_positive(self) -> bool {
        self > 0
    }
    fn min_of(self, other: Self) -> Self {
        core::cmp::min(self, other)
    }
    fn to_f64(self) -> f64 {
        units_to_f64(self)
    }
}

impl Mass for f64 {
    const ZERO: Self = 0.0;
    fn covers(have: Self, need: Self) -> bool {
        have >= need - MASS_TOL
    }
    fn is_positive(self) -> bool {
        self > FLOW_EPS
    }
    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
    fn to_f64(self) -> f64 {
        self
    }
}

pub fn sum<M: Mass>(xs: impl IntoIterator<Item = M>) -> M {
    let mut s = M::ZERO;
    for x in xs {
        s += x;
    }
    s
}

/// Weights paired with quotas in a common arithmetic.
pub(crate) enum Quantized {
    Exact { weights: Vec<i64>, quotas: Vec<i64> },
    Float { weights: Vec<f64>, quotas: Vec<f64> },
}

pub(crate) fn quantize(
    weights: &[f64],
    weight_units: Option<&[i64]>,
    quotas: &[f64],
    quota_units: Option<&[i64]>,
) -> Quantized {
    let q_units: Option<Vec<i64>> = match quota_units {
        Some(u) => Some(u.to_vec()),
        None => quotas.iter().map(|&q| decimal_units(q)).collect(),
    };
    match (weight_units, q_units) {
        (Some(w), Some(q)) => Quantized::Exact { weights: w.to_vec(), quotas: q },
        _ => Quantized::Float { weights: weights.to_vec(), quotas: quotas.to_vec() },
    }
}

/// Runs `$body` with `$w`/`$q` bound to the quantized weights and quotas in
/// whichever arithmetic applies.
macro_rules! with_masses {
    ($quantized:expr, |$w:ident, $q:ident| $body:expr) => {
        match $quantized {
            $crate::mass::Quantized::Exact { weights: $w, quotas: $q } => $body,
            $crate::mass::Quantized::Float { weights: $w, quotas: $q } => $body,
        }
    };
}
pub(crate) use with_masses;
