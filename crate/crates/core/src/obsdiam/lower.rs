//! Seeded heuristic lower bounds for spaces beyond the exact caps.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{distance_field, obsdiam_objective, underline_objective, ObsMode, ObsResult};
use crate::diameters::{partial_diameter, partial_diameter_upper, underline_diam, window_diameter};
use crate::error::{Error, Result};
use crate::limits::{PARTIAL_DIAMETER_CAP, UNDERLINE_POINTS_CAP};
use crate::space::{mcshane_extension, pushforward_values, AlphaVector, FiniteMMSpace, LipschitzField};

const CLAMP_SWEEPS: usize = 200;
const ASCENT_PASSES: usize = 3;

/// Best `diam(f_* μ; α)` over a fixed portfolio of 1-Lipschitz fields:
/// distance fields to single points and to `budget` random subsets,
/// normalized coordinates when the space has them, and `budget` random
/// starts pushed into the Lipschitz polytope and improved by coordinate
/// ascent. Deterministic in `seed`.
pub fn obsdiam_lower(space: &FiniteMMSpace, alpha: f64, budget: usize, seed: u64) -> Result<ObsResult> {
    crate::diameters::partial::check_alpha(alpha)?;
    let (value, field) = portfolio(space, budget, seed, &mut |f| obsdiam_objective(space, f, alpha))?;
    let upper_bound = if space.support().len() <= PARTIAL_DIAMETER_CAP {
        partial_diameter(space, alpha)?
    } else {
        partial_diameter_upper(space, alpha)?
    };
    Ok(ObsResult { value, mode: ObsMode::LowerBound, witness: LipschitzField::one_lipschitz(space, field)?, upper_bound })
}

/// The same portfolio for `u-diam`. The upper bound is infinite past the
/// `underline_diam` cap.
pub fn underline_obsdiam_lower(space: &FiniteMMSpace, abar: &AlphaVector, budget: usize, seed: u64) -> Result<ObsResult> {
    if !abar.l1_at_most_one() {
        return Err(Error::MassExceedsOne(abar.l1()));
    }
    let (value, field) = portfolio(space, budget, seed, &mut |f| underline_objective(space, f, abar))?;
    let upper_bound = if space.support().len() <= UNDERLINE_POINTS_CAP {
        underline_diam(space, abar)?.value.to_f64()
    } else {
        f64::INFINITY
    };
    Ok(ObsResult { value, mode: ObsMode::LowerBound, witness: LipschitzField::one_lipschitz(space, field)?, upper_bound })
}

/// Largest `diam(f_* μ; α)` over the coordinate functions, each divided by
/// its Lipschitz constant when that exceeds one.
pub fn coordinate_projection_estimate(space: &FiniteMMSpace, alpha: f64) -> Result<f64> {
    let fields = coordinate_fields(space).ok_or_else(|| Error::DegenerateInput("space has no coordinates".into()))?;
    let mut best: f64 = 0.0;
    for f in fields {
        best = best.max(window_diameter(&pushforward_values(space, &f)?, alpha)?);
    }
    Ok(best)
}

fn coordinate_fields(space: &FiniteMMSpace) -> Option<Vec<Vec<f64>>> {
    let coords = space.coords()?;
    let dim = coords.first().map_or(0, |c| c.len());
    let n = space.len();
    let mut out = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut lip: f64 = 0.0;
        for x in 0..n {
            for y in x + 1..n {
                let d = space.d(x, y);
                if d > 0.0 {
                    lip = lip.max((coords[x][k] - coords[y][k]).abs() / d);
                }
            }
        }
        let scale = lip.max(1.0);
        out.push(coords.iter().map(|c| c[k] / scale).collect());
    }
    Some(out)
}

type Objective<'a> = dyn FnMut(&[f64]) -> Result<f64> + 'a;

fn portfolio(space: &FiniteMMSpace, budget: usize, seed: u64, objective: &mut Objective<'_>) -> Result<(f64, Vec<f64>)> {
    let n = space.len();
    let pts = space.support().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (0.0, alloc::vec![0.0; n]);
    let consider = |f: Vec<f64>, objective: &mut Objective<'_>, best: &mut (f64, Vec<f64>)| -> Result<()> {
        let v = objective(&f)?;
        if v > best.0 {
            *best = (v, f);
        }
        Ok(())
    };
    for &x in &pts {
        consider(distance_field(space, x), objective, &mut best)?;
    }
    for _ in 0..budget {
        let size = rng.random_range(1..=(pts.len() / 2).max(1));
        let anchors: Vec<usize> = (0..size).map(|_| pts[rng.random_range(0..pts.len())]).collect();
        let zero = alloc::vec![0.0; n];
        consider(mcshane_extension(space, &anchors, &zero), objective, &mut best)?;
    }
    if let Some(fields) = coordinate_fields(space) {
        for f in fields {
            consider(f, objective, &mut best)?;
        }
    }
    let diam = space.diameter();
    for _ in 0..budget {
        let mut f: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * diam).collect();
        clamp(space, &mut f);
        let all: Vec<usize> = (0..n).collect();
        let mut f = mcshane_extension(space, &all, &f);
        let mut v = objective(&f)?;
        for _ in 0..ASCENT_PASSES {
            let mut improved = false;
            for &x in &pts {
                let (lo, hi) = slack(space, &f, x);
                let old = f[x];
                for target in [hi, lo] {
                    if !target.is_finite() {
                        continue;
                    }
                    f[x] = target;
                    let u = objective(&f)?;
                    if u > v {
                        v = u;
                        improved = true;
                        break;
                    }
                    f[x] = old;
                }
            }
            if !improved {
                break;
            }
        }
        if v > best.0 {
            best = (v, f);
        }
    }
    Ok(best)
}

/// Gauss–Seidel sweeps that split each violated pair symmetrically.
fn clamp(space: &FiniteMMSpace, f: &mut [f64]) {
    let n = f.len();
    for _ in 0..CLAMP_SWEEPS {
        let mut moved = false;
        for x in 0..n {
            for y in x + 1..n {
                let d = space.d(x, y);
                let gap = f[x] - f[y];
                if gap.abs() > d + 1e-12 {
                    let mid = 0.5 * (f[x] + f[y]);
                    let half = 0.5 * d * gap.signum();
                    f[x] = mid + half;
                    f[y] = mid - half;
                    moved = true;
                }
            }
        }
        if !moved {
            break;
        }
    }
}

/// Range of values at `x` keeping `f` 1-Lipschitz.
fn slack(space: &FiniteMMSpace, f: &[f64], x: usize) -> (f64, f64) {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for y in 0..f.len() {
        if y != x {
            lo = lo.max(f[y] - space.d(x, y));
            hi = hi.min(f[y] + space.d(x, y));
        }
    }
    (lo, hi)
}

/// Default restart count for the heuristic portfolio.
pub const DEFAULT_BUDGET: usize = 16;
