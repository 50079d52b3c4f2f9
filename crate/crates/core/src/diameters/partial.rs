use alloc::vec::Vec;

use super::{first_feasible, threshold_masks, thresholds};
use crate::clique::heavy_clique;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::mass::{quantize, with_masses, Mass};
use crate::space::{FiniteMMSpace, Measure1D};

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

/// Smallest diameter of a support subset with mass at least `alpha`.
pub fn partial_diameter(space: &FiniteMMSpace, alpha: f64) -> Result<f64> {
    partial_diameter_with(space, alpha, &Limits::default())
}

pub fn partial_diameter_with(space: &FiniteMMSpace, alpha: f64, limits: &Limits) -> Result<f64> {
    check_alpha(alpha)?;
    let mut pts: Vec<usize> = space.support().to_vec();
    Limits::check("partial_diameter", pts.len(), limits.partial_diameter.min(64))?;
    // heavy points first so the clique search meets the quota early
    pts.sort_by(|&a, &b| space.weight(b).total_cmp(&space.weight(a)).then(a.cmp(&b)));
    let w: Vec<f64> = pts.iter().map(|&i| space.weight(i)).collect();
    let wu: Option<Vec<i64>> = space.weight_units().map(|u| pts.iter().map(|&i| u[i]).collect());
    let ts = thresholds(space, &pts);
    let q = quantize(&w, wu.as_deref(), &[alpha], None);
    let k = with_masses!(q, |w, q| first_feasible(&ts, |d| {
        let adj = threshold_masks(space, &pts, d);
        heavy_clique(&adj, &w, q[0])
    }));
    // the full support always carries mass one
    Ok(ts[k.unwrap_or(ts.len() - 1)])
}

/// Upper bound on `partial_diameter` for supports of any size: from every
/// support point, greedily add the point that keeps the diameter smallest
/// until the mass reaches `alpha`.
pub fn partial_diameter_upper(space: &FiniteMMSpace, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let pts = space.support();
    let n = pts.len();
    let mut best = f64::INFINITY;
    let mut far = alloc::vec![0.0; n];
    let mut taken = alloc::vec![false; n];
    for c in 0..n {
        far.iter_mut().enumerate().for_each(|(b, v)| *v = space.d(pts[c], pts[b]));
        taken.iter_mut().for_each(|t| *t = false);
        taken[c] = true;
        let mut mass = space.weight(pts[c]);
        let mut diam: f64 = 0.0;
        while mass < alpha - crate::mass::MASS_TOL && diam < best {
            let Some(b) = (0..n).filter(|&b| !taken[b]).min_by(|&a, &b| far[a].total_cmp(&far[b])) else {
                break;
            };
            taken[b] = true;
            mass += space.weight(pts[b]);
            diam = diam.max(far[b]);
            for (y, v) in far.iter_mut().enumerate() {
                *v = v.max(space.d(pts[b], pts[y]));
            }
        }
        best = best.min(diam);
    }
    Ok(best)
}

/// Shortest window of consecutive atoms carrying mass at least `alpha`.
pub fn window_diameter(m: &Measure1D, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let pos: Vec<f64> = m.atoms().iter().map(|a| a.0).collect();
    let w: Vec<f64> = m.atoms().iter().map(|a| a.1).collect();
    let q = quantize(&w, m.units(), &[alpha], None);
    Ok(with_masses!(q, |w, q| shortest_window(&pos, &w, q[0]).unwrap_or(f64::INFINITY)))
}

/// Two-pointer sweep over sorted positions.
pub(crate) fn shortest_window<M: Mass>(pos: &[f64], w: &[M], quota: M) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut acc = M::ZERO;
    let mut j = 0;
    for i in 0..pos.len() {
        while j < pos.len() && !M::covers(acc, quota) {
            acc += w[j];
            j += 1;
        }
        if !M::covers(acc, quota) {
            break;
        }
        let len = pos[j - 1] - pos[i];
        best = Some(best.map_or(len, |b: f64| b.min(len)));
        acc -= w[i];
    }
    best
}
