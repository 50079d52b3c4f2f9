//! Distances between measures, fields and spaces.

use alloc::vec;
use alloc::vec::Vec;

use crate::clique::{full_mask, max_weight_clique};
use crate::diameters::partial_diameter;
use crate::error::{Error, Result};
use crate::limits::{Limits, ISO_SUBSET_CAP, PARTIAL_DIAMETER_CAP};
use crate::mass::{decimal_units, quantize, with_masses, Mass, MASS_TOL};
use crate::obsdiam::obsdiam_aggregate;
use crate::solvers::flow::transport;
use crate::space::FiniteMMSpace;

/// Prokhorov distance between two measures on one finite metric, with
/// closed neighborhoods.
///
/// With `F(δ)` the largest mass movable along arcs of length at most `δ`,
/// the distance is the least `max(δ, 1 - F(δ))` over pairwise distances `δ`.
pub fn prokhorov(dist: &[Vec<f64>], mu: &[f64], nu: &[f64]) -> Result<f64> {
    let n = dist.len();
    for found in [mu.len(), nu.len()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    if let Some(row) = dist.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: row.len() });
    }
    let mut ts: Vec<f64> = vec![0.0];
    for (x, row) in dist.iter().enumerate() {
        for (y, &d) in row.iter().enumerate() {
            if mu[x] > 0.0 && nu[y] > 0.0 {
                ts.push(d);
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mu_units: Option<Vec<i64>> = mu.iter().map(|&m| decimal_units(m)).collect();
    let nu_units: Option<Vec<i64>> = nu.iter().map(|&m| decimal_units(m)).collect();
    let q = match (&mu_units, &nu_units) {
        (Some(a), Some(_)) if a.iter().sum::<i64>() == crate::mass::UNIT_SCALE => {
            quantize(mu, mu_units.as_deref(), nu, nu_units.as_deref())
        }
        _ => quantize(mu, None, nu, None),
    };
    Ok(with_masses!(q, |a, b| {
        let total = crate::mass::sum(a.iter().copied());
        let mut best: f64 = 1.0;
        for &t in &ts {
            if t >= best {
                break;
            }
            let moved = transport(&a, &b, |x, y| dist[x][y] <= t).value;
            best = best.min(t.max((total - moved).to_f64()));
        }
        best
    }))
}

/// `inf { ε >= 0 : μ(|f - g| > ε) <= ε }`.
pub fn ky_fan(weights: &[f64], f: &[f64], g: &[f64]) -> Result<f64> {
    if f.len() != weights.len() || g.len() != weights.len() {
        return Err(Error::DimensionMismatch { expected: weights.len(), found: f.len().max(g.len()) });
    }
    let mut diffs: Vec<(f64, f64)> = f.iter().zip(g).zip(weights).map(|((a, b), &w)| ((a - b).abs(), w)).collect();
    diffs.retain(|d| d.1 > 0.0);
    diffs.sort_by(|a, b| b.0.total_cmp(&a.0));
    // levels v_1 > v_2 > ...; on [v_{k+1}, v_k) the tail mass is that of the top k levels
    let mut levels: Vec<(f64, f64)> = Vec::new();
    for (v, w) in diffs {
        match levels.last_mut() {
            Some(last) if last.0 == v => last.1 += w,
            _ => levels.push((v, w)),
        }
    }
    let Some(&(top, _)) = levels.first() else {
        return Ok(0.0);
    };
    let mut best = top;
    let mut tail = 0.0;
    for k in 0..levels.len() {
        tail += levels[k].1;
        let floor = levels.get(k + 1).map_or(0.0, |l| l.0);
        let eps = floor.max(tail);
        if eps < levels[k].0 {
            best = best.min(eps);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BoxMode {
    Exact,
    Bounds,
}

/// A coupling together with the set of pairs on which it is trusted.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoxWitness {
    /// `coupling[x][y]`, indexed by points of the two spaces.
    pub coupling: Vec<Vec<f64>>,
    /// Pairs `(x, y)` with mutual distortion at most the distance.
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoxEstimate {
    pub lower: f64,
    pub upper: f64,
    pub mode: BoxMode,
    pub witness: Option<BoxWitness>,
}

/// Exact box distance for tiny spaces.
///
/// A pair of parameters is the same as a coupling `π`, and the good set of
/// the unit interval is the preimage of a set `S` of pairs. So the distance
/// is the least `max(dis S, 1 - max_π π(S))` over sets of pairs.
pub fn box_exact_tiny(x: &FiniteMMSpace, y: &FiniteMMSpace) -> Result<BoxEstimate> {
    box_exact_tiny_with(x, y, &Limits::default())
}

pub fn box_exact_tiny_with(x: &FiniteMMSpace, y: &FiniteMMSpace, limits: &Limits) -> Result<BoxEstimate> {
    let px = x.support();
    let py = y.support();
    let pairs: Vec<(usize, usize)> = px.iter().flat_map(|&a| py.iter().map(move |&b| (a, b))).collect();
    Limits::check("box_exact_tiny pairs", pairs.len(), limits.box_pairs.min(30))?;
    let m = pairs.len();
    let distortion = |i: usize, j: usize| (x.d(pairs[i].0, pairs[j].0) - y.d(pairs[i].1, pairs[j].1)).abs();
    let mut dis = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            dis[i][j] = distortion(i, j);
        }
    }
    let wx: Vec<f64> = px.iter().map(|&a| x.weight(a)).collect();
    let wy: Vec<f64> = py.iter().map(|&b| y.weight(b)).collect();
    let ux: Option<Vec<i64>> = x.weight_units().map(|u| px.iter().map(|&a| u[a]).collect());
    let uy: Option<Vec<i64>> = y.weight_units().map(|u| py.iter().map(|&b| u[b]).collect());
    let q = match (&ux, &uy) {
        (Some(_), Some(_)) => quantize(&wx, ux.as_deref(), &wy, uy.as_deref()),
        _ => quantize(&wx, None, &wy, None),
    };
    let nb = py.len();
    let (value, mask, flow) = with_masses!(q, |a, b| {
        let mut best = (1.0, 0u32, None);
        for mask in 1u32..(1 << m) {
            let mut d: f64 = 0.0;
            for i in 0..m {
                if mask >> i & 1 == 1 {
                    for j in i + 1..m {
                        if mask >> j & 1 == 1 {
                            d = d.max(dis[i][j]);
                        }
                    }
                }
            }
            if d >= best.0 {
                continue;
            }
            let t = transport(&a, &b, |i, j| mask >> (i * nb + j) & 1 == 1);
            let total = crate::mass::sum(a.iter().copied());
            let v = d.max((total - t.value).to_f64());
            if v < best.0 {
                let flow: Vec<Vec<f64>> = t.flow.iter().map(|r| r.iter().map(|v| v.to_f64()).collect()).collect();
                best = (v, mask, Some(flow));
            }
        }
        best
    });
    let mut coupling = vec![vec![0.0; y.len()]; x.len()];
    match flow {
        Some(local) => {
            // top the partial flow up to a full coupling off the trusted set
            let mut rx: Vec<f64> = wx.clone();
            let mut ry: Vec<f64> = wy.clone();
            for (i, row) in local.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    coupling[px[i]][py[j]] += v;
                    rx[i] -= v;
                    ry[j] -= v;
                }
            }
            north_west(&mut coupling, px, py, &mut rx, &mut ry);
        }
        None => {
            let mut rx = wx.clone();
            let mut ry = wy.clone();
            north_west(&mut coupling, px, py, &mut rx, &mut ry);
        }
    }
    let chosen = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
    Ok(BoxEstimate {
        lower: value,
        upper: value,
        mode: BoxMode::Exact,
        witness: Some(BoxWitness { coupling, pairs: chosen }),
    })
}

fn north_west(coupling: &mut [Vec<f64>], px: &[usize], py: &[usize], rx: &mut [f64], ry: &mut [f64]) {
    let (mut i, mut j) = (0, 0);
    while i < px.len() && j < py.len() {
        let v = rx[i].min(ry[j]).max(0.0);
        coupling[px[i]][py[j]] += v;
        rx[i] -= v;
        ry[j] -= v;
        if rx[i] <= MASS_TOL {
            i += 1;
        } else {
            j += 1;
        }
    }
}

/// Cheap two-sided bounds on the box distance for spaces of any size.
///
/// The upper bound takes the least of one, the larger diameter, twice the
/// Prokhorov distance when the spaces share a metric, and three times the
/// parameter of a weight-ranked point matching read as an approximate
/// isomorphism. The lower bound uses that `□(X, Y) <= ε` forces
/// `diam(X; β - ε) <= diam(Y; β) + ε`, at `β` in `{1/2, 3/4, 1}` and both
/// ways round.
pub fn box_bounds(x: &FiniteMMSpace, y: &FiniteMMSpace) -> Result<BoxEstimate> {
    let mut upper = f64::min(1.0, x.diameter().max(y.diameter()));
    if x.same_metric(y) {
        upper = upper.min(2.0 * prokhorov(&x.dist_rows(), x.weights(), y.weights())?);
    }
    let map = rank_matching(x, y);
    upper = upper.min(3.0 * iso_parameter(x, y, &map)?);
    let mut lower: f64 = 0.0;
    if x.support().len() <= PARTIAL_DIAMETER_CAP && y.support().len() <= PARTIAL_DIAMETER_CAP {
        for beta in [0.5, 0.75, 1.0] {
            lower = lower.max(diameter_gap(x, y, beta)?).max(diameter_gap(y, x, beta)?);
        }
    }
    Ok(BoxEstimate { lower: lower.min(upper), upper, mode: BoxMode::Bounds, witness: None })
}

/// Largest `ε` found with `diam(X; β - ε) > diam(Y; β) + ε`.
fn diameter_gap(x: &FiniteMMSpace, y: &FiniteMMSpace, beta: f64) -> Result<f64> {
    let target = partial_diameter(y, beta)?;
    let gap = |e: f64| -> Result<bool> { Ok(partial_diameter(x, beta - e)? > target + e) };
    if !gap(0.0)? {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, beta);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Support points of `x` matched to those of `y` by weight rank; the
/// identity when the spaces share a metric.
fn rank_matching(x: &FiniteMMSpace, y: &FiniteMMSpace) -> Vec<Option<usize>> {
    if x.same_metric(y) {
        return (0..x.len()).map(Some).collect();
    }
    let rank = |s: &FiniteMMSpace| {
        let mut p = s.support().to_vec();
        p.sort_by(|&a, &b| s.weight(b).total_cmp(&s.weight(a)).then(a.cmp(&b)));
        p
    };
    let rx = rank(x);
    let ry = rank(y);
    let mut map = vec![None; x.len()];
    for (k, &a) in rx.iter().enumerate() {
        map[a] = Some(ry[k.min(ry.len() - 1)]);
    }
    map
}

/// Least `ε` for which `map` is an `ε`-mm-isomorphism.
fn iso_parameter(x: &FiniteMMSpace, y: &FiniteMMSpace, map: &[Option<usize>]) -> Result<f64> {
    let f = total_on_support(x, map)?;
    let pts = x.support();
    let mut ts: Vec<f64> = vec![0.0];
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            ts.push((x.d(a, b) - y.d(f[a], f[b])).abs());
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut best: f64 = 1.0;
    for t in ts {
        if t >= best {
            break;
        }
        let (_, mass, _) = compatible_subset(x, y, &f, t);
        best = best.min(t.max(1.0 - mass));
    }
    Ok(best.max(pushforward_prokhorov(x, y, &f)?))
}

fn total_on_support(x: &FiniteMMSpace, map: &[Option<usize>]) -> Result<Vec<usize>> {
    if map.len() != x.len() {
        return Err(Error::LengthMismatch { expected: x.len(), found: map.len() });
    }
    let mut f = vec![0usize; x.len()];
    for &a in x.support() {
        f[a] = map[a].ok_or(Error::NotDefinedOnSupport(a))?;
    }
    Ok(f)
}

/// A heaviest subset of the support with distortion at most `eps` under
/// `f`: exact up to the bitmask cap, greedy by weight beyond it (flagged by
/// the last field).
fn compatible_subset(x: &FiniteMMSpace, y: &FiniteMMSpace, f: &[usize], eps: f64) -> (Vec<usize>, f64, bool) {
    let pts = x.support();
    let ok = |a: usize, b: usize| (x.d(a, b) - y.d(f[a], f[b])).abs() <= eps + 1e-12;
    let set: Vec<usize> = if pts.len() <= ISO_SUBSET_CAP {
        let adj: Vec<u64> = pts
            .iter()
            .map(|&a| pts.iter().enumerate().filter(|&(_, &b)| ok(a, b)).fold(0u64, |m, (k, _)| m | 1 << k))
            .collect();
        let w: Vec<f64> = pts.iter().map(|&a| x.weight(a)).collect();
        let mask = max_weight_clique(&adj, &w, full_mask(pts.len()));
        (0..pts.len()).filter(|&k| mask >> k & 1 == 1).map(|k| pts[k]).collect()
    } else {
        let mut order = pts.to_vec();
        order.sort_by(|&a, &b| x.weight(b).total_cmp(&x.weight(a)).then(a.cmp(&b)));
        let mut kept: Vec<usize> = Vec::new();
        for a in order {
            if kept.iter().all(|&b| ok(a, b)) {
                kept.push(a);
            }
        }
        kept.sort_unstable();
        kept
    };
    let mass = x.mass_of(&set);
    (set, mass, pts.len() <= ISO_SUBSET_CAP)
}

fn pushforward_prokhorov(x: &FiniteMMSpace, y: &FiniteMMSpace, f: &[usize]) -> Result<f64> {
    let mut push = vec![0.0; y.len()];
    let units = x.weight_units();
    let mut push_units = vec![0i64; y.len()];
    for &a in x.support() {
        push[f[a]] += x.weight(a);
        if let Some(u) = units {
            push_units[f[a]] += u[a];
        }
    }
    if units.is_some() {
        // keep the exact decimals so that the flow runs in integer units
        push = push_units.iter().map(|&u| crate::mass::units_to_f64(u)).collect();
    }
    prokhorov(&y.dist_rows(), &push, y.weights())
}

/// Outcome of [`eps_mm_iso_check`], one flag per condition.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IsoReport {
    pub ok: bool,
    /// Some subset of mass at least `1 - eps` has distortion at most `eps`.
    pub measure_condition: bool,
    /// The whole support has distortion at most `eps`.
    pub distortion_condition: bool,
    /// `d_P(f_* μ_X, μ_Y) <= eps`.
    pub prokhorov_condition: bool,
    /// The heaviest subset with distortion at most `eps`.
    pub subset: Vec<usize>,
    pub subset_mass: f64,
    pub prokhorov: f64,
    /// False when the subset search fell back to the greedy.
    pub exhaustive: bool,
}

/// Checks whether `map` is an `eps`-mm-isomorphism from `x` to `y`.
pub fn eps_mm_iso_check(x: &FiniteMMSpace, y: &FiniteMMSpace, map: &[Option<usize>], eps: f64) -> Result<IsoReport> {
    let f = total_on_support(x, map)?;
    let (subset, subset_mass, exhaustive) = compatible_subset(x, y, &f, eps);
    let pts = x.support();
    let distortion_condition =
        pts.iter().all(|&a| pts.iter().all(|&b| (x.d(a, b) - y.d(f[a], f[b])).abs() <= eps + 1e-12));
    let measure_condition = subset_mass >= 1.0 - eps - MASS_TOL;
    let dp = pushforward_prokhorov(x, y, &f)?;
    let prokhorov_condition = dp <= eps + MASS_TOL;
    Ok(IsoReport {
        ok: measure_condition && prokhorov_condition,
        measure_condition,
        distortion_condition,
        prokhorov_condition,
        subset,
        subset_mass,
        prokhorov: dp,
        exhaustive,
    })
}

/// `(a/2, a)` with `a` the aggregate observable diameter, an interval that
/// contains the observable distance to the one-point space.
pub fn dconc_interval_vs_point(space: &FiniteMMSpace) -> Result<(f64, f64)> {
    Limits::check("dconc_interval_vs_point points", space.support().len(), Limits::default().obs_points)?;
    let a = obsdiam_aggregate(space)?.value;
    Ok((a / 2.0, a))
}
