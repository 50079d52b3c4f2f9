use alloc::vec;
use alloc::vec::Vec;

use super::cone::{Cone, BOUND_TOL};
use super::{best_distance_field, obsdiam_objective, ObsMode, ObsResult};
use crate::diameters::partial::check_alpha;
use crate::diameters::partial_diameter;
use crate::error::Result;
use crate::limits::Limits;
use crate::mass::{quantize, with_masses, Mass};
use crate::space::{FiniteMMSpace, LipschitzField};

/// `sup { diam(f_* μ; α) : f 1-Lipschitz }`, exactly.
pub fn obsdiam_exact(space: &FiniteMMSpace, alpha: f64) -> Result<ObsResult> {
    obsdiam_exact_with(space, alpha, &Limits::default())
}

pub fn obsdiam_exact_with(space: &FiniteMMSpace, alpha: f64, limits: &Limits) -> Result<ObsResult> {
    check_alpha(alpha)?;
    let pts = space.support();
    Limits::check("obsdiam_exact points", pts.len(), limits.obs_points)?;
    let upper_bound = partial_diameter(space, alpha)?;
    let (seed, seed_field) = best_distance_field(space, |f| obsdiam_objective(space, f, alpha))?;
    let w: Vec<f64> = pts.iter().map(|&i| space.weight(i)).collect();
    let wu: Option<Vec<i64>> = space.weight_units().map(|u| pts.iter().map(|&i| u[i]).collect());
    let q = quantize(&w, wu.as_deref(), &[alpha], None);
    let found = with_masses!(q, |w, q| {
        let mut dfs = Dfs {
            space,
            pts,
            w: &w,
            quota: q[0],
            order: Vec::with_capacity(pts.len()),
            used: vec![false; pts.len()],
            best: seed,
            found: None,
        };
        dfs.extend(f64::INFINITY);
        dfs.found
    });
    let field = match found {
        Some((order, gaps)) => Cone::from_order(space, &order).field(space, &gaps),
        None => seed_field,
    };
    let value = obsdiam_objective(space, &field, alpha)?;
    Ok(ObsResult {
        value,
        mode: ObsMode::Exact,
        witness: LipschitzField::one_lipschitz(space, field)?,
        upper_bound,
    })
}

/// Depth-first search over orders of the support. A prefix is abandoned once
/// a window closed inside it is already too short to beat the incumbent.
struct Dfs<'a, M> {
    space: &'a FiniteMMSpace,
    pts: &'a [usize],
    w: &'a [M],
    quota: M,
    /// Local indices into `pts`.
    order: Vec<usize>,
    used: Vec<bool>,
    best: f64,
    found: Option<(Vec<usize>, Vec<f64>)>,
}

impl<M: Mass> Dfs<'_, M> {
    fn extend(&mut self, bound: f64) {
        let n = self.pts.len();
        let k = self.order.len();
        if k == n {
            self.leaf(bound);
            return;
        }
        for a in 0..n {
            if self.used[a] {
                continue;
            }
            // one order of each reversal pair: the first entry stays below the last
            if k == n - 1 && n > 1 && self.order[0] > a {
                continue;
            }
            self.order.push(a);
            self.used[a] = true;
            let b = match self.closing_window() {
                Some(i) => bound.min(self.space.d(self.pts[self.order[i]], self.pts[a])),
                None => bound,
            };
            if b > self.best + BOUND_TOL {
                self.extend(b);
            }
            self.used[a] = false;
            self.order.pop();
        }
    }

    /// Latest start of a window ending at the newest entry with enough mass.
    fn closing_window(&self) -> Option<usize> {
        let mut acc = M::ZERO;
        for i in (0..self.order.len()).rev() {
            acc += self.w[self.order[i]];
            if M::covers(acc, self.quota) {
                return Some(i);
            }
        }
        None
    }

    fn leaf(&mut self, bound: f64) {
        let n = self.order.len();
        let mut windows = Vec::with_capacity(n);
        let mut acc = M::ZERO;
        let mut i = 0;
        // for each end, the latest start covering the quota
        for j in 0..n {
            acc += self.w[self.order[j]];
            if !M::covers(acc, self.quota) {
                continue;
            }
            while i < j && M::covers(acc - self.w[self.order[i]], self.quota) {
                acc -= self.w[self.order[i]];
                i += 1;
            }
            if i < j {
                windows.push((i, j));
            } else {
                // a single atom carries the quota
                windows.push((j, j));
            }
        }
        let points: Vec<usize> = self.order.iter().map(|&a| self.pts[a]).collect();
        let cone = Cone::from_order(self.space, &points);
        if windows.iter().any(|w| w.0 == w.1) {
            return;
        }
        if let Some((v, gaps)) = cone.maximin(&windows, bound) {
            if v > self.best + BOUND_TOL {
                self.best = v;
                self.found = Some((points, gaps));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diameters::partial_diameter;
    use proptest::prelude::*;

    fn two(d: f64, w: [f64; 2]) -> FiniteMMSpace {
        FiniteMMSpace::from_matrix(vec![vec![0.0, d], vec![d, 0.0]], w.to_vec()).unwrap()
    }

    /// Grid search over `f(b) - f(a)` in `[-d, d]`.
    fn two_point_grid(d: f64, w: [f64; 2], alpha: f64) -> f64 {
        let s = two(d, w);
        (0..=200)
            .map(|k| -d + 2.0 * d * k as f64 / 200.0)
            .map(|t| obsdiam_objective(&s, &[0.0, t], alpha).unwrap())
            .fold(0.0, f64::max)
    }

    #[test]
    fn examples() {
        let one = FiniteMMSpace::one_point();
        assert_eq!(obsdiam_exact(&one, 0.5).unwrap().value, 0.0);
        let s = two(1.0, [0.5, 0.5]);
        assert_eq!(obsdiam_exact(&s, 0.5).unwrap().value, 0.0);
        assert_eq!(obsdiam_exact(&s, 0.7).unwrap().value, 1.0);
        assert_eq!(two_point_grid(1.0, [0.5, 0.5], 0.5), 0.0);
        assert_eq!(two_point_grid(1.0, [0.5, 0.5], 0.7), 1.0);
    }

    #[test]
    fn witness_is_consistent() {
        let dist = vec![
            vec![0.0, 1.0, 2.0, 2.0],
            vec![1.0, 0.0, 1.0, 2.0],
            vec![2.0, 1.0, 0.0, 1.0],
            vec![2.0, 2.0, 1.0, 0.0],
        ];
        let s = FiniteMMSpace::from_matrix(dist, vec![0.1, 0.4, 0.3, 0.2]).unwrap();
        for alpha in [0.2, 0.5, 0.75, 0.95, 1.0] {
            let r = obsdiam_exact(&s, alpha).unwrap();
            let v = obsdiam_objective(&s, r.witness.values(), alpha).unwrap();
            assert!((v - r.value).abs() < 1e-7);
            assert!(r.value <= r.upper_bound + 1e-7);
        }
    }

    fn random_space(n: usize, seed: &[u32]) -> FiniteMMSpace {
        // path-metric closure of random edge lengths
        let mut d = vec![vec![0.0; n]; n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                let v = 0.5 + (seed[k % seed.len()] % 10) as f64 / 4.0;
                d[i][j] = v;
                d[j][i] = v;
                k += 1;
            }
        }
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    d[i][j] = f64::min(d[i][j], d[i][m] + d[m][j]);
                }
            }
        }
        let raw: Vec<u32> = (0..n).map(|i| 1 + seed[(i + 7) % seed.len()] % 5).collect();
        let total: u32 = raw.iter().sum();
        let w = raw.iter().map(|&r| r as f64 / total as f64).collect();
        FiniteMMSpace::from_matrix(d, w).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn bounded_by_partial_diameter(n in 1usize..=6, seed in proptest::collection::vec(0u32..1000, 16), a in 1u32..=20) {
            let s = random_space(n, &seed);
            let alpha = a as f64 / 20.0;
            let r = obsdiam_exact(&s, alpha).unwrap();
            prop_assert!(r.value <= partial_diameter(&s, alpha).unwrap() + 1e-7);
            prop_assert!(r.value >= 0.0);
        }
    }
}
