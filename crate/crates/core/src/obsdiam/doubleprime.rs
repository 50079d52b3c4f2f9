use alloc::vec;
use alloc::vec::Vec;

use super::bnb::{self, Window};
use super::cone::{for_each_weak_order, Cone, BOUND_TOL};
use super::{best_distance_field, doubleprime_objective, ObsMode, ObsResult};
use crate::diameters::doubleprime::maximal_vectors;
use crate::diameters::multi::search;
use crate::error::Result;
use crate::limits::Limits;
use crate::mass::{quantize, sum, with_masses, Mass};
use crate::space::{AlphaVector, FiniteMMSpace, LipschitzField};

/// How far the witness is pushed off the cone boundary, as a fraction.
const NUDGE: f64 = 1e-8;

/// `sup { diam″(f_* μ; ᾱ) : f 1-Lipschitz }`.
///
/// `diam″` is not continuous where values of `f` collide, so the supremum
/// runs over weak orders: each field lies inside exactly one cone of
/// functions constant on blocks and strictly increasing across them. The
/// value on a closed cone is the limit from its interior, and the witness
/// sits just inside.
pub fn obsdiam_doubleprime(space: &FiniteMMSpace, abar: &AlphaVector) -> Result<ObsResult> {
    obsdiam_doubleprime_with(space, abar, &Limits::default())
}

pub fn obsdiam_doubleprime_with(space: &FiniteMMSpace, abar: &AlphaVector, limits: &Limits) -> Result<ObsResult> {
    let pts = space.support();
    let n = pts.len();
    Limits::check("obsdiam_doubleprime points", n, limits.obs_doubleprime)?;
    Limits::check("obsdiam_doubleprime indices", abar.len(), limits.multi_index)?;
    let (seed, seed_field) = best_distance_field(space, |f| doubleprime_objective(space, f, abar))?;
    let w: Vec<f64> = pts.iter().map(|&i| space.weight(i)).collect();
    let wu: Option<Vec<i64>> = space.weight_units().map(|u| pts.iter().map(|&i| u[i]).collect());
    let q = quantize(&w, wu.as_deref(), abar.values(), abar.units());
    let (found, bound) = with_masses!(q, |w, q| {
        let mut best = seed;
        let mut bound = seed;
        let mut found: Option<(Vec<Vec<usize>>, Vec<f64>)> = None;
        let local: Vec<usize> = (0..n).collect();
        for_each_weak_order(&local, |blocks| {
            if blocks.len() < 2 {
                return;
            }
            let wb: Vec<_> = blocks.iter().map(|b| sum(b.iter().map(|&a| w[a]))).collect();
            let groups: Vec<Vec<usize>> = blocks.iter().map(|b| b.iter().map(|&a| pts[a]).collect()).collect();
            let cone = Cone::new(space, groups);
            for v in maximal_vectors(&wb, &q) {
                let ub = vector_bound(&cone, &wb, &v);
                bound = f64::max(bound, ub);
                if ub <= best + BOUND_TOL {
                    continue;
                }
                let improved = bnb::maximize(&cone, ub, best, |g| line_prime(&cone.positions(g), &wb, &v));
                if let Some((val, gaps)) = improved {
                    best = val;
                    found = Some((cone.blocks.clone(), gaps));
                }
            }
        });
        ((found.map(|(b, g)| (b, g, best))), bound)
    });
    let (field, value) = match found {
        Some((blocks, gaps, v)) => {
            let cone = Cone::new(space, blocks);
            (cone.field(space, &cone.nudge_inward(&gaps, NUDGE)), v)
        }
        None => (seed_field, seed),
    };
    Ok(ObsResult {
        value,
        mode: ObsMode::Exact,
        witness: LipschitzField::one_lipschitz(space, field)?,
        upper_bound: bound,
    })
}

/// Smallest threshold on the block limits at which disjoint block sets meet
/// the quotas `v`. Every field of the cone has a family at most this wide.
fn vector_bound<M: Mass>(cone: &Cone, wb: &[M], v: &[M]) -> f64 {
    let m = cone.len();
    let mut ts: Vec<f64> = vec![0.0];
    for a in 0..m {
        for b in a + 1..m {
            ts.push(cone.limit[a][b]);
        }
    }
    threshold_search(&mut ts, |t| {
        let adj = masks(m, |a, b| cone.limit[a][b] <= t);
        search(&adj, wb, v)
    })
    .0
}

/// `diam′` of atoms at sorted positions `pos`, with the hulls of an optimal
/// family.
fn line_prime<M: Mass>(pos: &[f64], wb: &[M], v: &[M]) -> (f64, Vec<Window>) {
    let m = pos.len();
    let mut ts: Vec<f64> = vec![0.0];
    for a in 0..m {
        for b in a + 1..m {
            ts.push(pos[b] - pos[a]);
        }
    }
    let (t, parts) = threshold_search(&mut ts, |t| {
        let adj = masks(m, |a, b| (pos[b] - pos[a]).abs() <= t);
        search(&adj, wb, v)
    });
    let windows = parts
        .iter()
        .map(|&p| (p.trailing_zeros() as usize, 63 - p.leading_zeros() as usize))
        .collect();
    (t, windows)
}

fn masks(m: usize, adjacent: impl Fn(usize, usize) -> bool) -> Vec<u64> {
    (0..m)
        .map(|a| (0..m).filter(|&b| a == b || adjacent(a.min(b), a.max(b))).fold(0u64, |acc, b| acc | 1 << b))
        .collect()
}

/// Smallest threshold with a family, which must exist at the largest.
fn threshold_search(ts: &mut Vec<f64>, mut family: impl FnMut(f64) -> Option<Vec<u64>>) -> (f64, Vec<u64>) {
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let (mut lo, mut hi) = (0usize, ts.len() - 1);
    let mut best = family(ts[hi]).expect("a maximal vector fits the complete graph");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match family(ts[mid]) {
            Some(p) => {
                best = p;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    (ts[lo], best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equilateral(w: Vec<f64>) -> FiniteMMSpace {
        let n = w.len();
        let dist = (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect();
        FiniteMMSpace::from_matrix(dist, w).unwrap()
    }

    fn abar(v: &[f64]) -> AlphaVector {
        AlphaVector::new(v.to_vec()).unwrap()
    }

    /// Grid over the Lipschitz polytope of a three-point space, `f(0) = 0`.
    fn grid(s: &FiniteMMSpace, a: &AlphaVector, steps: i32) -> f64 {
        let mut best: f64 = 0.0;
        let d = s.diameter();
        let h = 2.0 * d / steps as f64;
        for i in 0..=steps {
            for j in 0..=steps {
                let f = [0.0, -d + h * i as f64, -d + h * j as f64];
                let ok = (0..3).all(|x| (0..3).all(|y| (f[x] - f[y]).abs() <= s.d(x, y) + 1e-12));
                if ok {
                    best = best.max(doubleprime_objective(s, &f, a).unwrap());
                }
            }
        }
        best
    }

    #[test]
    fn examples() {
        let a = abar(&[0.5, 0.5]);
        assert_eq!(obsdiam_doubleprime(&FiniteMMSpace::one_point(), &a).unwrap().value, 0.0);
        let two = equilateral(vec![0.7, 0.3]);
        assert_eq!(obsdiam_doubleprime(&two, &a).unwrap().value, 0.0);
        let three = equilateral(vec![0.5, 0.3, 0.2]);
        let a = abar(&[0.4, 0.4]);
        let r = obsdiam_doubleprime(&three, &a).unwrap();
        let g = grid(&three, &a, 40);
        assert!(r.value > 0.0);
        assert!(r.value >= g - 1e-7, "{} < {}", r.value, g);
        let v = doubleprime_objective(&three, r.witness.values(), &a).unwrap();
        assert!((v - r.value).abs() < 1e-7);
    }

    #[test]
    fn matches_grid_on_a_path() {
        let dist = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]];
        let s = FiniteMMSpace::from_matrix(dist, vec![0.2, 0.5, 0.3]).unwrap();
        for a in [&[0.3, 0.3][..], &[0.5, 0.2], &[0.2, 0.2, 0.2], &[0.6]] {
            let a = abar(a);
            let r = obsdiam_doubleprime(&s, &a).unwrap();
            let g = grid(&s, &a, 80);
            assert!(r.value >= g - 1e-7 && r.value <= g + 0.1, "{:?}: {} vs {}", a, r.value, g);
        }
    }
}
