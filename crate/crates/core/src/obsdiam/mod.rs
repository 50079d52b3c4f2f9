//! Observable diameters.
//!
//! The exact routines split the 1-Lipschitz polytope into order cones. On a
//! cone every objective here is a min-max of spans of windows, which are
//! linear in the gaps between consecutive values. The single-parameter case
//! is one maximin LP per cone; the multivariable cases run a branch and bound
//! over the windows that must stay long.

use alloc::vec::Vec;

mod aggregate;
mod bnb;
mod cone;
mod doubleprime;
mod exact;
mod lower;
mod repair;
mod underline;

pub use aggregate::{obsdiam_aggregate, obsdiam_aggregate_with, Aggregate};
pub use doubleprime::{obsdiam_doubleprime, obsdiam_doubleprime_with};
pub use exact::{obsdiam_exact, obsdiam_exact_with};
pub use lower::{coordinate_projection_estimate, obsdiam_lower, underline_obsdiam_lower, DEFAULT_BUDGET};
pub use repair::{lipschitz_repair, Repair};
pub use underline::{underline_obsdiam, underline_obsdiam_with};

use crate::diameters::{diam_doubleprime, line_underline_diam, window_diameter};
use crate::error::Result;
use crate::space::{pushforward_values, AlphaVector, FiniteMMSpace, LipschitzField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ObsMode {
    Exact,
    LowerBound,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObsResult {
    pub value: f64,
    pub mode: ObsMode,
    /// A 1-Lipschitz field whose objective is `value`.
    pub witness: LipschitzField,
    /// The matching partial diameter, which bounds `value` from above.
    pub upper_bound: f64,
}

/// `diam(f_* μ; α)`.
pub fn obsdiam_objective(space: &FiniteMMSpace, f: &[f64], alpha: f64) -> Result<f64> {
    window_diameter(&pushforward_values(space, f)?, alpha)
}

/// `u-diam(f_* μ; ᾱ)`, infinite when `Σ α_i > 1`.
pub fn underline_objective(space: &FiniteMMSpace, f: &[f64], abar: &AlphaVector) -> Result<f64> {
    Ok(line_underline_diam(&pushforward_values(space, f)?, abar)?.value.to_f64())
}

/// `diam″(f_* μ; ᾱ)`.
pub fn doubleprime_objective(space: &FiniteMMSpace, f: &[f64], abar: &AlphaVector) -> Result<f64> {
    diam_doubleprime(&pushforward_values(space, f)?.to_space(), abar)
}

/// The distance field `x -> d(x, anchor)`.
pub(crate) fn distance_field(space: &FiniteMMSpace, anchor: usize) -> Vec<f64> {
    (0..space.len()).map(|x| space.d(x, anchor)).collect()
}

/// Best distance field from a support point under `objective`.
pub(crate) fn best_distance_field(
    space: &FiniteMMSpace,
    mut objective: impl FnMut(&[f64]) -> Result<f64>,
) -> Result<(f64, Vec<f64>)> {
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for &x in space.support() {
        let f = distance_field(space, x);
        let v = objective(&f)?;
        if v > best.0 {
            best = (v, f);
        }
    }
    Ok(best)
}
