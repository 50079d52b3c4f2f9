use alloc::vec::Vec;

use super::multi::search;
use super::{first_feasible, threshold_masks, thresholds};
use crate::error::Result;
use crate::limits::Limits;
use crate::mass::{quantize, with_masses, Mass};
use crate::space::{AlphaVector, FiniteMMSpace};

/// `diam(X; ᾱ)` with the convention that an empty family set gives 0.
pub fn diam_prime(space: &FiniteMMSpace, abar: &AlphaVector) -> Result<f64> {
    let limits = Limits::default();
    Limits::check("diam_prime points", space.support().len(), limits.multi_points)?;
    Limits::check("diam_prime indices", abar.len(), limits.multi_index)?;
    let (w, wu) = support_masses(space);
    let q = quantize(&w, wu.as_deref(), abar.values(), abar.units());
    Ok(with_masses!(q, |w, q| prime_value(space, &w, &q)))
}

/// Supremum of `diam′(X; ᾱ′)` over positive `ᾱ′ <= ᾱ` componentwise.
pub fn diam_doubleprime(space: &FiniteMMSpace, abar: &AlphaVector) -> Result<f64> {
    diam_doubleprime_with(space, abar, &Limits::default())
}

pub fn diam_doubleprime_with(space: &FiniteMMSpace, abar: &AlphaVector, limits: &Limits) -> Result<f64> {
    Limits::check("diam_doubleprime points", space.support().len(), limits.multi_points.min(64))?;
    Limits::check("diam_doubleprime indices", abar.len(), limits.multi_index)?;
    let (w, wu) = support_masses(space);
    let q = quantize(&w, wu.as_deref(), abar.values(), abar.units());
    Ok(with_masses!(q, |w, q| {
        let mut best: f64 = 0.0;
        for v in maximal_vectors(&w, &q) {
            best = best.max(prime_value(space, &w, &v));
        }
        best
    }))
}

/// The maximal vectors `(min(α_i, μ(A_i)))_i` over disjoint families of
/// positive-mass support subsets, as reals.
pub fn maximal_subvectors(space: &FiniteMMSpace, abar: &AlphaVector) -> Vec<Vec<f64>> {
    let (w, wu) = support_masses(space);
    let q = quantize(&w, wu.as_deref(), abar.values(), abar.units());
    with_masses!(q, |w, q| maximal_vectors(&w, &q)
        .into_iter()
        .map(|v| v.iter().map(|m| m.to_f64()).collect())
        .collect())
}

fn support_masses(space: &FiniteMMSpace) -> (Vec<f64>, Option<Vec<i64>>) {
    let pts = space.support();
    let w = pts.iter().map(|&i| space.weight(i)).collect();
    let wu = space.weight_units().map(|u| pts.iter().map(|&i| u[i]).collect());
    (w, wu)
}

/// `diam′` on the support with masses `w` (support order) and quotas `q`.
pub(crate) fn prime_value<M: Mass>(space: &FiniteMMSpace, w: &[M], q: &[M]) -> f64 {
    let pts = space.support();
    let ts = thresholds(space, pts);
    let ok = |d: f64| search(&threshold_masks(space, pts, d), w, q).is_some();
    if !ok(*ts.last().unwrap()) {
        return 0.0;
    }
    ts[first_feasible(&ts, ok).unwrap()]
}

/// Pareto-maximal capped mass vectors of surjective assignments of the
/// points to the parts. Every such vector is feasible for its own family.
pub(crate) fn maximal_vectors<M: Mass>(w: &[M], cap: &[M]) -> Vec<Vec<M>> {
    let n = cap.len();
    if w.len() < n {
        return Vec::new();
    }
    let mut states: Vec<Vec<M>> = alloc::vec![alloc::vec![M::ZERO; n]];
    for &m in w {
        let mut next: Vec<Vec<M>> = Vec::with_capacity(states.len() * n);
        for s in &states {
            for i in 0..n {
                let mut t = s.clone();
                t[i] = (t[i] + m).min_of(cap[i]);
                next.push(t);
            }
        }
        states = pareto(next);
    }
    states.retain(|s| s.iter().all(|m| m.is_positive()));
    states
}

fn pareto<M: Mass>(mut v: Vec<Vec<M>>) -> Vec<Vec<M>> {
    // lexicographically descending, so a dominating vector comes first
    v.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b) {
            match y.partial_cmp(x) {
                Some(core::cmp::Ordering::Equal) | None => continue,
                Some(o) => return o,
            }
        }
        core::cmp::Ordering::Equal
    });
    v.dedup();
    let mut kept: Vec<Vec<M>> = Vec::new();
    for s in v {
        if !kept.iter().any(|k| k.iter().zip(&s).all(|(a, b)| a >= b)) {
            kept.push(s);
        }
    }
    kept
}
