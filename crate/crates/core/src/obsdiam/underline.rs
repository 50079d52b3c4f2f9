use alloc::vec;
use alloc::vec::Vec;

use super::cone::{for_each_order, Cone, BOUND_TOL};
use super::{best_distance_field, bnb, underline_objective, ObsMode, ObsResult};
use crate::diameters::line::{index_orders, line_decide, line_min_span};
use crate::diameters::underline_diam;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::mass::{quantize, with_masses, Mass};
use crate::space::{AlphaVector, FiniteMMSpace, LipschitzField};

/// `sup { u-diam(f_* μ; ᾱ) : f 1-Lipschitz }`, exactly. Requires `Σ α_i <= 1`.
pub fn underline_obsdiam(space: &FiniteMMSpace, abar: &AlphaVector) -> Result<ObsResult> {
    underline_obsdiam_with(space, abar, &Limits::default())
}

pub fn underline_obsdiam_with(space: &FiniteMMSpace, abar: &AlphaVector, limits: &Limits) -> Result<ObsResult> {
    if !abar.l1_at_most_one() {
        return Err(Error::MassExceedsOne(abar.l1()));
    }
    let pts = space.support();
    let n = pts.len();
    Limits::check("underline_obsdiam points", n, limits.obs_points)?;
    let upper_bound = underline_diam(space, abar)?.value.to_f64();
    let (seed, seed_field) = best_distance_field(space, |f| underline_objective(space, f, abar))?;
    let w: Vec<f64> = pts.iter().map(|&i| space.weight(i)).collect();
    let wu: Option<Vec<i64>> = space.weight_units().map(|u| pts.iter().map(|&i| u[i]).collect());
    let q = quantize(&w, wu.as_deref(), abar.values(), abar.units());
    let found = with_masses!(q, |w, q| {
        let perms = index_orders(&q);
        let mut best = seed;
        let mut found: Option<(Vec<usize>, Vec<f64>)> = None;
        let local: Vec<usize> = (0..n).collect();
        for_each_order(&local, |order| {
            let points: Vec<usize> = order.iter().map(|&a| pts[a]).collect();
            let wp: Vec<_> = order.iter().map(|&a| w[a]).collect();
            let ub = cone_bound(space, &points, &wp, &q, &perms);
            if ub <= best + BOUND_TOL {
                return;
            }
            let cone = Cone::from_order(space, &points);
            let improved = bnb::maximize(&cone, ub, best, |g| {
                let pos = cone.positions(g);
                line_min_span(&pos, &wp, &q).expect("quotas fit in the total mass")
            });
            if let Some((v, gaps)) = improved {
                best = v;
                found = Some((points, gaps));
            }
        });
        found
    });
    let field = match found {
        Some((order, gaps)) => Cone::from_order(space, &order).field(space, &gaps),
        None => seed_field,
    };
    let value = underline_objective(space, &field, abar)?;
    Ok(ObsResult {
        value,
        mode: ObsMode::Exact,
        witness: LipschitzField::one_lipschitz(space, field)?,
        upper_bound,
    })
}

/// Line u-diam with each window priced by the diameter of its points in the
/// space, which bounds its span under every 1-Lipschitz field.
fn cone_bound<M: Mass>(space: &FiniteMMSpace, points: &[usize], w: &[M], q: &[M], perms: &[Vec<usize>]) -> f64 {
    let n = points.len();
    let mut cost = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let far = (a..b).map(|k| space.d(points[k], points[b])).fold(0.0, f64::max);
            cost[a][b] = f64::max(cost[a][b - 1], far);
        }
    }
    let mut ts: Vec<f64> = cost.iter().flatten().copied().collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let ends = |t: f64| -> Vec<usize> { (0..n).map(|a| (a..n).rev().find(|&b| cost[a][b] <= t).unwrap()).collect() };
    let (mut lo, mut hi) = (0usize, ts.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if line_decide(w, q, &ends(ts[mid]), perms).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    ts[lo]
}
