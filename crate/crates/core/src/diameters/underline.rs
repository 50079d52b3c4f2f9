use alloc::vec;
use alloc::vec::Vec;

use super::{first_feasible, threshold_masks, thresholds, ExtendedReal};
use crate::error::Result;
use crate::limits::Limits;
use crate::mass::{quantize, with_masses, Mass};
use crate::solvers::flow::transport;
use crate::space::{AlphaVector, FiniteMMSpace, SubProbDecomposition};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UnderlineDiam {
    pub value: ExtendedReal,
    /// An optimal family `α_i μ_i`, absent only when the family set is empty.
    pub decomposition: Option<SubProbDecomposition>,
    /// Set when `Σ α_i > 1`, so that no sub-probability family exists.
    pub empty_family: bool,
}

/// Minimum over `Σ α_i μ_i <= μ` of `max_i diam supp μ_i`. Supports may
/// overlap.
pub fn underline_diam(space: &FiniteMMSpace, abar: &AlphaVector) -> Result<UnderlineDiam> {
    underline_diam_with(space, abar, &Limits::default())
}

pub fn underline_diam_with(space: &FiniteMMSpace, abar: &AlphaVector, limits: &Limits) -> Result<UnderlineDiam> {
    let pts = space.support();
    Limits::check("underline_diam points", pts.len(), limits.underline_points.min(64))?;
    let w: Vec<f64> = pts.iter().map(|&i| space.weight(i)).collect();
    let wu: Option<Vec<i64>> = space.weight_units().map(|u| pts.iter().map(|&i| u[i]).collect());
    let q = quantize(&w, wu.as_deref(), abar.values(), abar.units());
    with_masses!(q, |w, q| {
        let total = crate::mass::sum(w.iter().copied());
        if !Mass::covers(total, crate::mass::sum(q.iter().copied())) {
            return Ok(UnderlineDiam { value: ExtendedReal::Infinite, decomposition: None, empty_family: true });
        }
        let ts = thresholds(space, pts);
        let k = first_feasible(&ts, |d| assign(space, pts, d, &w, &q).is_some())
            .expect("the full support is a clique carrying every quota");
        let (cliques, flow) = assign(space, pts, ts[k], &w, &q).unwrap();
        let n = q.len();
        let mut mass = vec![vec![0.0; space.len()]; n];
        for i in 0..n {
            for (a, &x) in pts.iter().enumerate() {
                mass[i][x] = flow[i][a].to_f64();
            }
        }
        let supports = cliques
            .iter()
            .map(|&c| (0..pts.len()).filter(|&a| c >> a & 1 == 1).map(|a| pts[a]).collect())
            .collect();
        Ok(UnderlineDiam {
            value: ExtendedReal::Finite(ts[k]),
            decomposition: Some(SubProbDecomposition { supports, mass }),
            empty_family: false,
        })
    })
}

/// Maximal cliques of a bitmask graph (Bron–Kerbosch with pivoting).
pub(crate) fn maximal_cliques(adj: &[u64]) -> Vec<u64> {
    fn bk(adj: &[u64], r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
        if p == 0 && x == 0 {
            out.push(r);
            return;
        }
        let px = p | x;
        let u = px.trailing_zeros() as usize;
        let mut cand = p & !(adj[u] & !(1 << u));
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            let nv = adj[v] & !(1 << v);
            bk(adj, r | 1 << v, p & nv, x & nv, out);
            p &= !(1 << v);
            x |= 1 << v;
        }
    }
    let mut out = Vec::new();
    bk(adj, 0, crate::clique::full_mask(adj.len()), 0, &mut out);
    out.sort_unstable();
    out
}

/// An assignment of indices to maximal cliques of the `d`-threshold graph
/// whose transport problem is feasible, with the flow.
fn assign<M: Mass>(space: &FiniteMMSpace, pts: &[usize], d: f64, w: &[M], q: &[M]) -> Option<(Vec<u64>, Vec<Vec<M>>)> {
    let adj = threshold_masks(space, pts, d);
    let cliques = maximal_cliques(&adj);
    let n = q.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| q[b].partial_cmp(&q[a]).unwrap_or(core::cmp::Ordering::Equal).then(a.cmp(&b)));
    let mut choice = vec![0usize; n];
    if place(&cliques, w, q, &order, 0, &mut choice) {
        let chosen: Vec<u64> = (0..n).map(|i| cliques[choice[i]]).collect();
        let t = transport(q, w, |i, a| chosen[i] >> a & 1 == 1);
        Some((chosen, t.flow))
    } else {
        None
    }
}

fn place<M: Mass>(cliques: &[u64], w: &[M], q: &[M], order: &[usize], k: usize, choice: &mut [usize]) -> bool {
    if k == order.len() {
        return true;
    }
    let i = order[k];
    let start = if k > 0 && q[order[k - 1]] == q[i] { choice[order[k - 1]] } else { 0 };
    for c in start..cliques.len() {
        choice[i] = c;
        // Hall condition on the assigned prefix
        let demands: Vec<M> = order[..=k].iter().map(|&j| q[j]).collect();
        let t = transport(&demands, w, |r, a| cliques[choice[order[r]]] >> a & 1 == 1);
        if t.saturated && place(cliques, w, q, order, k + 1, choice) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diameters::{multi_partial_diameter, partial_diameter};

    fn two(w: [f64; 2]) -> FiniteMMSpace {
        FiniteMMSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]], w.to_vec()).unwrap()
    }

    fn abar(v: &[f64]) -> AlphaVector {
        AlphaVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn examples() {
        let one = FiniteMMSpace::one_point();
        let r = underline_diam(&one, &abar(&[0.3, 0.3, 0.4])).unwrap();
        assert_eq!(r.value, ExtendedReal::Finite(0.0));
        let a = abar(&[0.5, 0.5]);
        assert_eq!(underline_diam(&two([0.7, 0.3]), &a).unwrap().value, ExtendedReal::Finite(1.0));
        let r = underline_diam(&two([0.5, 0.5]), &a).unwrap();
        assert_eq!(r.value, ExtendedReal::Finite(0.0));
        r.decomposition.unwrap().validate(&two([0.5, 0.5]), &a).unwrap();
    }

    #[test]
    fn over_unit_mass_is_empty() {
        let r = underline_diam(&two([0.5, 0.5]), &abar(&[0.6, 0.5])).unwrap();
        assert!(r.empty_family);
        assert_eq!(r.value, ExtendedReal::Infinite);
        assert!(underline_diam(&two([0.5, 0.5]), &abar(&[1.2])).unwrap().empty_family);
    }

    #[test]
    fn maximal_cliques_of_a_path() {
        // 0 - 1 - 2
        let adj = [0b011, 0b111, 0b110];
        assert_eq!(maximal_cliques(&adj), vec![0b011, 0b110]);
    }

    #[test]
    fn witness_is_optimal_and_valid() {
        let dist = vec![
            vec![0.0, 1.0, 2.0, 3.0],
            vec![1.0, 0.0, 1.0, 2.0],
            vec![2.0, 1.0, 0.0, 1.0],
            vec![3.0, 2.0, 1.0, 0.0],
        ];
        let s = FiniteMMSpace::from_matrix(dist, vec![0.25; 4]).unwrap();
        for a in [&[0.5, 0.5][..], &[0.4, 0.3], &[0.3, 0.3, 0.3], &[0.6], &[0.2, 0.7]] {
            let a = abar(a);
            let r = underline_diam(&s, &a).unwrap();
            let dec = r.decomposition.unwrap();
            dec.validate(&s, &a).unwrap();
            assert!(dec.max_support_diameter(&s) <= r.value.to_f64());
            let m = multi_partial_diameter(&s, &a).unwrap();
            assert!(r.value <= m);
            if a.len() == 1 {
                assert_eq!(r.value.to_f64(), partial_diameter(&s, a.values()[0]).unwrap());
            }
        }
    }
}
