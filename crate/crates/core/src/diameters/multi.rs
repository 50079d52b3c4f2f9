use alloc::vec;
use alloc::vec::Vec;

use super::{first_feasible, threshold_masks, thresholds, ExtendedReal};
use crate::clique::{full_mask, mask_mass};
use crate::error::Result;
use crate::limits::Limits;
use crate::mass::{quantize, sum, with_masses, Mass};
use crate::space::{AlphaVector, FiniteMMSpace};

/// Pairwise disjoint point sets, one per index of the parameter vector.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DisjointFamily {
    pub parts: Vec<Vec<usize>>,
}

impl DisjointFamily {
    pub fn max_diameter(&self, space: &FiniteMMSpace) -> f64 {
        self.parts.iter().map(|p| space.set_diameter(p)).fold(0.0, f64::max)
    }
}

/// Minimum over disjoint families `{A_i}` with `μ(A_i) >= α_i` of the largest
/// `diam A_i`; `+∞` when no such family exists.
pub fn multi_partial_diameter(space: &FiniteMMSpace, abar: &AlphaVector) -> Result<ExtendedReal> {
    multi_partial_diameter_with(space, abar, &Limits::default())
}

pub fn multi_partial_diameter_with(space: &FiniteMMSpace, abar: &AlphaVector, limits: &Limits) -> Result<ExtendedReal> {
    let pts = space.support();
    Limits::check("multi_partial_diameter points", pts.len(), limits.multi_points.min(64))?;
    Limits::check("multi_partial_diameter indices", abar.len(), limits.multi_index)?;
    Ok(min_threshold(space, abar.values(), abar.units()).map_or(ExtendedReal::Infinite, |(d, _)| ExtendedReal::Finite(d)))
}

/// Smallest threshold admitting a disjoint family for `quotas`, with the
/// family found there. No caps are checked.
pub(crate) fn min_threshold(space: &FiniteMMSpace, quotas: &[f64], quota_units: Option<&[i64]>) -> Option<(f64, DisjointFamily)> {
    let pts = space.support();
    let ts = thresholds(space, pts);
    let top = *ts.last().unwrap();
    family_at(space, quotas, quota_units, top)?;
    let k = first_feasible(&ts, |d| family_at(space, quotas, quota_units, d).is_some())?;
    let fam = family_at(space, quotas, quota_units, ts[k])?;
    Some((ts[k], fam))
}

/// A disjoint family with `μ(A_i) >= quota_i` and every `diam A_i <= d`.
pub fn disjoint_family_exists(space: &FiniteMMSpace, abar: &AlphaVector, d: f64) -> Option<DisjointFamily> {
    family_at(space, abar.values(), abar.units(), d)
}

pub(crate) fn family_at(space: &FiniteMMSpace, quotas: &[f64], quota_units: Option<&[i64]>, d: f64) -> Option<DisjointFamily> {
    let pts = space.support();
    if pts.len() > 64 {
        return None;
    }
    let w: Vec<f64> = pts.iter().map(|&i| space.weight(i)).collect();
    let wu: Option<Vec<i64>> = space.weight_units().map(|u| pts.iter().map(|&i| u[i]).collect());
    let adj = threshold_masks(space, pts, d);
    let q = quantize(&w, wu.as_deref(), quotas, quota_units);
    let masks = with_masses!(q, |w, q| search(&adj, &w, &q))?;
    let parts = masks
        .iter()
        .map(|&m| (0..pts.len()).filter(|&a| m >> a & 1 == 1).map(|a| pts[a]).collect())
        .collect();
    Some(DisjointFamily { parts })
}

/// Disjoint cliques meeting every quota, as local bitmasks in index order.
pub(crate) fn search<M: Mass>(adj: &[u64], w: &[M], quotas: &[M]) -> Option<Vec<u64>> {
    let n = quotas.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| quotas[b].partial_cmp(&quotas[a]).unwrap_or(core::cmp::Ordering::Equal).then(a.cmp(&b)));
    let mut parts = vec![0u64; n];
    let mut s = Search { adj, w, quotas, order: &order, parts: &mut parts };
    if s.place(0, full_mask(adj.len())) {
        Some(parts)
    } else {
        None
    }
}

struct Search<'a, M> {
    adj: &'a [u64],
    w: &'a [M],
    quotas: &'a [M],
    order: &'a [usize],
    parts: &'a mut [u64],
}

impl<M: Mass> Search<'_, M> {
    fn place(&mut self, k: usize, avail: u64) -> bool {
        if k == self.order.len() {
            return true;
        }
        let need = sum(self.order[k..].iter().map(|&i| self.quotas[i]));
        if !M::covers(mask_mass(self.w, avail), need) {
            return false;
        }
        // parts with equal quotas are interchangeable: order them by lowest point
        let floor = if k > 0 && self.quotas[self.order[k]] == self.quotas[self.order[k - 1]] {
            self.parts[self.order[k - 1]].trailing_zeros() as usize + 1
        } else {
            0
        };
        let cand = if floor >= 64 { 0 } else { avail & (u64::MAX << floor) };
        self.grow(k, avail, cand, 0, M::ZERO)
    }

    /// Enumerates cliques by adding points in increasing index order, stopping
    /// as soon as the quota is met.
    fn grow(&mut self, k: usize, avail: u64, mut cand: u64, clique: u64, mass: M) -> bool {
        let quota = self.quotas[self.order[k]];
        if clique != 0 && M::covers(mass, quota) {
            self.parts[self.order[k]] = clique;
            return self.place(k + 1, avail & !clique);
        }
        while cand != 0 {
            if !M::covers(mass + mask_mass(self.w, cand), quota) {
                return false;
            }
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            if self.grow(k, avail, cand & self.adj[v], clique | 1 << v, mass + self.w[v]) {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diameters::partial_diameter;

    fn two(w: [f64; 2]) -> FiniteMMSpace {
        FiniteMMSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]], w.to_vec()).unwrap()
    }

    fn abar(v: &[f64]) -> AlphaVector {
        AlphaVector::new(v.to_vec()).unwrap()
    }

    /// All assignments of points to parts or to nothing.
    fn brute(s: &FiniteMMSpace, a: &[f64]) -> ExtendedReal {
        let n = s.len();
        let k = a.len();
        let mut best = ExtendedReal::Infinite;
        let total = (k + 1).pow(n as u32);
        for code in 0..total {
            let mut parts = vec![Vec::new(); k];
            let mut c = code;
            for x in 0..n {
                let p = c % (k + 1);
                c /= k + 1;
                if p < k {
                    parts[p].push(x);
                }
            }
            if (0..k).all(|i| s.mass_of(&parts[i]) >= a[i] - 1e-12) {
                let d = parts.iter().map(|p| s.set_diameter(p)).fold(0.0, f64::max);
                if ExtendedReal::Finite(d) < best {
                    best = ExtendedReal::Finite(d);
                }
            }
        }
        best
    }

    #[test]
    fn examples() {
        let one = FiniteMMSpace::one_point();
        assert_eq!(multi_partial_diameter(&one, &abar(&[0.4])).unwrap(), ExtendedReal::Finite(0.0));
        let s = two([0.5, 0.5]);
        assert_eq!(multi_partial_diameter(&s, &abar(&[0.5, 0.5])).unwrap(), brute(&s, &[0.5, 0.5]));
        assert_eq!(multi_partial_diameter(&s, &abar(&[0.5, 0.5])).unwrap(), ExtendedReal::Finite(0.0));
        let s = two([0.7, 0.3]);
        assert_eq!(multi_partial_diameter(&s, &abar(&[0.5, 0.5])).unwrap(), ExtendedReal::Infinite);
        assert_eq!(brute(&s, &[0.5, 0.5]), ExtendedReal::Infinite);
    }

    #[test]
    fn entries_above_one_are_infinite() {
        let s = two([0.5, 0.5]);
        assert_eq!(multi_partial_diameter(&s, &abar(&[1.5])).unwrap(), ExtendedReal::Infinite);
    }

    #[test]
    fn single_index_matches_partial_diameter() {
        let dist = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.5], vec![2.0, 1.5, 0.0]];
        let s = FiniteMMSpace::from_matrix(dist, vec![0.2, 0.3, 0.5]).unwrap();
        for a in [0.1, 0.2, 0.3, 0.5, 0.51, 0.8, 1.0] {
            let m = multi_partial_diameter(&s, &abar(&[a])).unwrap();
            assert_eq!(m, ExtendedReal::Finite(partial_diameter(&s, a).unwrap()), "alpha {a}");
        }
    }

    #[test]
    fn matches_brute_force_on_small_spaces() {
        let dist = vec![
            vec![0.0, 1.0, 2.0, 2.5],
            vec![1.0, 0.0, 1.5, 2.0],
            vec![2.0, 1.5, 0.0, 1.0],
            vec![2.5, 2.0, 1.0, 0.0],
        ];
        let s = FiniteMMSpace::from_matrix(dist, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        for a in [&[0.3, 0.3][..], &[0.2, 0.2, 0.2], &[0.4, 0.4], &[0.1, 0.1], &[0.5, 0.5], &[0.6, 0.3]] {
            assert_eq!(multi_partial_diameter(&s, &abar(a)).unwrap(), brute(&s, a), "{a:?}");
        }
    }
}
