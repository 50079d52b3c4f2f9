//! Partial diameters.
//!
//! Every exact routine here is a threshold sweep: feasibility is monotone in
//! the threshold, so the answer is the smallest pairwise support distance (or
//! zero) at which a combinatorial feasibility test passes.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

pub(crate) mod doubleprime;
pub(crate) mod line;
pub(crate) mod multi;
pub(crate) mod partial;
mod underline;

pub use doubleprime::{diam_doubleprime, diam_doubleprime_with, diam_prime, maximal_subvectors};
pub use line::{line_underline_diam, LineFamily};
pub use multi::{disjoint_family_exists, multi_partial_diameter, multi_partial_diameter_with, DisjointFamily};
pub use partial::{partial_diameter, partial_diameter_upper, partial_diameter_with, window_diameter};
pub use underline::{underline_diam, underline_diam_with, UnderlineDiam};

use crate::space::FiniteMMSpace;

/// A nonnegative real or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// The value as an `f64`, with `+∞` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::Infinite => f64::INFINITY,
        }
    }

    /// Finite value, or `fallback` for `+∞`.
    pub fn finite_or(self, fallback: f64) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::Infinite => fallback,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinite => write!(f, "inf"),
        }
    }
}

/// Sorted distinct distances between points of `points`, starting with 0.
pub(crate) fn thresholds(space: &FiniteMMSpace, points: &[usize]) -> Vec<f64> {
    let mut t = Vec::with_capacity(points.len() * points.len() / 2 + 1);
    t.push(0.0);
    for (a, &x) in points.iter().enumerate() {
        for &y in &points[a + 1..] {
            t.push(space.d(x, y));
        }
    }
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

/// Index of the first threshold passing a monotone test, if any.
pub(crate) fn first_feasible(ts: &[f64], mut feasible: impl FnMut(f64) -> bool) -> Option<usize> {
    let (mut lo, mut hi) = (0usize, ts.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(ts[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    (lo < ts.len()).then_some(lo)
}

/// Adjacency bitmasks of the threshold graph on `points` (local indices),
/// self loops included.
pub(crate) fn threshold_masks(space: &FiniteMMSpace, points: &[usize], d: f64) -> Vec<u64> {
    let n = points.len();
    let mut adj = alloc::vec![0u64; n];
    for a in 0..n {
        for b in 0..n {
            if a == b || space.d(points[a], points[b]) <= d {
                adj[a] |= 1 << b;
            }
        }
    }
    adj
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_order() {
        assert!(ExtendedReal::Finite(3.0) < ExtendedReal::Infinite);
        assert_eq!(ExtendedReal::Infinite.to_f64(), f64::INFINITY);
        assert_eq!(alloc::format!("{}", ExtendedReal::Infinite), "inf");
    }

    #[test]
    fn binary_search_finds_first() {
        let ts = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(first_feasible(&ts, |d| d >= 2.0), Some(2));
        assert_eq!(first_feasible(&ts, |_| false), None);
        assert_eq!(first_feasible(&ts, |_| true), Some(0));
    }
}
