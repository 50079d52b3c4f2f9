use alloc::vec::Vec;

use super::{obsdiam_exact_with, obsdiam_lower, ObsMode, DEFAULT_BUDGET};
use crate::error::Result;
use crate::limits::Limits;
use crate::mass::{units_to_f64, MASS_TOL};
use crate::space::FiniteMMSpace;

/// Grid used when the support exceeds the exact cap.
const GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Aggregate {
    /// `inf_α max(1 - α, Obsdiam(X; α))`.
    pub value: f64,
    pub mode: ObsMode,
    /// Where the infimum is reached, or approached from the left.
    pub alpha: f64,
}

/// `inf over α in (0, 1) of max(1 - α, Obsdiam(X; α))`.
pub fn obsdiam_aggregate(space: &FiniteMMSpace) -> Result<Aggregate> {
    obsdiam_aggregate_with(space, &Limits::default(), 0)
}

/// Exact within `limits.obs_points`. Beyond that, a lower bound from the
/// heuristic portfolio on a uniform grid of `α`, seeded by `seed`.
///
/// `Obsdiam(X; α)` only changes where `α` crosses a subset sum of the atom
/// masses, and it is nondecreasing, so the exact infimum is found by a binary
/// search over those sums.
pub fn obsdiam_aggregate_with(space: &FiniteMMSpace, limits: &Limits, seed: u64) -> Result<Aggregate> {
    if space.support().len() > limits.obs_points {
        return grid_lower(space, seed);
    }
    let sums = subset_sums(space);
    let obs = |k: usize| obsdiam_exact_with(space, sums[k], limits).map(|r| r.value);
    // first breakpoint where the diameter catches up with 1 - α
    let (mut lo, mut hi) = (0usize, sums.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if obs(mid)? >= 1.0 - sums[mid] {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let k = lo;
    let at_k = obs(k)?;
    let mut best = Aggregate { value: at_k.max(1.0 - sums[k]), mode: ObsMode::Exact, alpha: sums[k] };
    if k > 0 && 1.0 - sums[k - 1] < best.value {
        best = Aggregate { value: 1.0 - sums[k - 1], mode: ObsMode::Exact, alpha: sums[k - 1] };
    }
    Ok(best)
}

/// Sorted distinct positive subset sums of the support masses.
pub(crate) fn subset_sums(space: &FiniteMMSpace) -> Vec<f64> {
    let pts = space.support();
    if let Some(u) = space.weight_units() {
        let mut s: Vec<i64> = alloc::vec![0];
        for &x in pts {
            let more: Vec<i64> = s.iter().map(|v| v + u[x]).collect();
            s.extend(more);
            s.sort_unstable();
            s.dedup();
        }
        return s.into_iter().filter(|&v| v > 0).map(units_to_f64).collect();
    }
    let mut s: Vec<f64> = alloc::vec![0.0];
    for &x in pts {
        let more: Vec<f64> = s.iter().map(|v| v + space.weight(x)).collect();
        s.extend(more);
        s.sort_by(f64::total_cmp);
        s.dedup_by(|a, b| (*a - *b).abs() <= MASS_TOL);
    }
    s.into_iter().filter(|&v| v > MASS_TOL).map(|v| v.min(1.0)).collect()
}

fn grid_lower(space: &FiniteMMSpace, seed: u64) -> Result<Aggregate> {
    // on (α_{j-1}, α_j] the diameter is at least its value at α_{j-1}
    let mut prev = 0.0;
    let mut best = Aggregate { value: f64::INFINITY, mode: ObsMode::LowerBound, alpha: 0.0 };
    for j in 1..=GRID {
        let a = j as f64 / GRID as f64;
        let v = f64::max(1.0 - a, prev);
        if v < best.value {
            best = Aggregate { value: v, mode: ObsMode::LowerBound, alpha: a };
        }
        prev = obsdiam_lower(space, a, DEFAULT_BUDGET, seed)?.value;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obsdiam::obsdiam_exact;
    use alloc::vec;

    fn two(d: f64) -> FiniteMMSpace {
        FiniteMMSpace::from_matrix(vec![vec![0.0, d], vec![d, 0.0]], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(obsdiam_aggregate(&FiniteMMSpace::one_point()).unwrap().value, 0.0);
        assert_eq!(obsdiam_aggregate(&two(1.0)).unwrap().value, 0.5);
        assert_eq!(obsdiam_aggregate(&two(0.2)).unwrap().value, 0.2);
    }

    /// The breakpoint search against a dense scan of `α`.
    #[test]
    fn matches_dense_scan() {
        let dist = vec![vec![0.0, 0.3, 0.5], vec![0.3, 0.0, 0.4], vec![0.5, 0.4, 0.0]];
        let s = FiniteMMSpace::from_matrix(dist, vec![0.2, 0.5, 0.3]).unwrap();
        let agg = obsdiam_aggregate(&s).unwrap().value;
        let mut scan = f64::INFINITY;
        let mut prev = 0.0;
        for k in 1..1000 {
            let a = k as f64 / 1000.0;
            let v = obsdiam_exact(&s, a).unwrap().value;
            assert!(v >= prev - 1e-12, "not monotone at {a}");
            prev = v;
            scan = scan.min(f64::max(1.0 - a, v));
        }
        assert!(agg <= scan + 1e-12 && agg >= scan - 1e-3, "{agg} vs {scan}");
    }

    #[test]
    fn grid_lower_is_below_exact() {
        let dist = vec![vec![0.0, 0.3, 0.5], vec![0.3, 0.0, 0.4], vec![0.5, 0.4, 0.0]];
        let s = FiniteMMSpace::from_matrix(dist, vec![0.2, 0.5, 0.3]).unwrap();
        let exact = obsdiam_aggregate(&s).unwrap().value;
        let lower = grid_lower(&s, 3).unwrap();
        assert_eq!(lower.mode, ObsMode::LowerBound);
        assert!(lower.value <= exact + 1e-12);
    }

    #[test]
    fn subset_sums_are_exact() {
        let s = FiniteMMSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.3, 0.7]).unwrap();
        assert_eq!(subset_sums(&s), vec![0.3, 0.7, 1.0]);
    }
}
