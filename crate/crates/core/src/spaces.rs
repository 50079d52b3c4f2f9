//! Seeded instance generators.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::mass::{units_to_f64, UNIT_SCALE};
use crate::space::{validate_space, AlphaVector, FiniteMMSpace, RawSpace};

/// Largest grid built by [`grid_cube`].
pub const GRID_CAP: usize = 4096;

/// A generator and its parameters; equal specs build equal spaces.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum GeneratorSpec {
    Sphere { dim: usize, radius: f64, samples: usize, seed: u64 },
    Grid { dim: usize, per_axis: usize },
    RandomDiscrete { points: usize, seed: u64, atomic_bias: f64 },
    Perturbed { base: alloc::boxed::Box<GeneratorSpec>, delta: f64, seed: u64 },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<FiniteMMSpace> {
        match self {
            GeneratorSpec::Sphere { dim, radius, samples, seed } => Ok(sphere_sample(*dim, *radius, *samples, *seed)),
            GeneratorSpec::Grid { dim, per_axis } => grid_cube(*dim, *per_axis),
            GeneratorSpec::RandomDiscrete { points, seed, atomic_bias } => {
                Ok(random_discrete(*points, *seed, *atomic_bias))
            }
            GeneratorSpec::Perturbed { base, delta, seed } => perturb_weights(&base.build()?, *delta, *seed),
        }
    }
}

/// `samples` uniform points on the sphere of dimension `dim` and radius
/// `r` in `R^(dim+1)`, with the intrinsic distance and equal weights.
pub fn sphere_sample(dim: usize, r: f64, samples: usize, seed: u64) -> FiniteMMSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<Vec<f64>> = (0..samples)
        .map(|_| loop {
            let g: Vec<f64> = (0..=dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let norm = libm::sqrt(g.iter().map(|v| v * v).sum::<f64>());
            if norm > 1e-300 {
                break g.iter().map(|v| r * v / norm).collect();
            }
        })
        .collect();
    let dist = (0..samples)
        .map(|i| (0..samples).map(|j| if i == j { 0.0 } else { sphere_distance(&coords[i], &coords[j], r) }).collect())
        .collect();
    let raw = RawSpace {
        labels: (0..samples).map(|i| format!("s{i}")).collect(),
        dist,
        weights: uniform(samples),
        weight_units: None,
        coords: Some(coords),
    };
    validate_space(raw).expect("sphere samples form a metric space")
}

/// `r * arccos(<u, v> / r^2)`, with the cosine clamped to `[-1, 1]`.
pub fn sphere_distance(u: &[f64], v: &[f64], r: f64) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    r * libm::acos((dot / (r * r)).clamp(-1.0, 1.0))
}

/// The grid `{0, ..., k-1}^m / (k-1)` with the sup metric and equal weights.
pub fn grid_cube(m: usize, k: usize) -> Result<FiniteMMSpace> {
    let size = (0..m).try_fold(1usize, |acc, _| acc.checked_mul(k)).unwrap_or(usize::MAX);
    Limits::check("grid_cube points", size, GRID_CAP)?;
    if k == 0 {
        return Err(Error::DegenerateInput("grid needs at least one point per axis".into()));
    }
    let step = if k > 1 { 1.0 / (k - 1) as f64 } else { 0.0 };
    let coords: Vec<Vec<f64>> = (0..size)
        .map(|mut c| {
            (0..m)
                .map(|_| {
                    let v = (c % k) as f64 * step;
                    c /= k;
                    v
                })
                .collect()
        })
        .collect();
    let dist = coords
        .iter()
        .map(|a| coords.iter().map(|b| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)).collect())
        .collect();
    validate_space(RawSpace {
        labels: (0..size).map(|i| format!("g{i}")).collect(),
        dist,
        weights: uniform(size),
        weight_units: None,
        coords: Some(coords),
    })
}

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// A random finite space on `n <= 64` points with exact decimal weights.
///
/// Edge lengths are drawn from `{0.05, 0.10, ..., 1.00}` and closed under
/// shortest paths. Weights are random integers normalized to millionths;
/// with probability `atomic_bias` one point is inflated to hold more than
/// half of the mass.
pub fn random_discrete(n: usize, seed: u64, atomic_bias: f64) -> FiniteMMSpace {
    let n = n.clamp(1, 64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.random_range(1..=20u32) as f64 * 0.05;
            dist[i][j] = v;
            dist[j][i] = v;
        }
    }
    floyd_warshall(&mut dist);
    let mut raw: Vec<u64> = (0..n).map(|_| rng.random_range(1..=20u64)).collect();
    if n > 1 && rng.random::<f64>() < atomic_bias {
        let j = rng.random_range(0..n);
        let rest: u64 = raw.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &v)| v).sum();
        raw[j] = rest + rng.random_range(1..=rest);
    }
    let units = normalize_units(&raw);
    let raw = RawSpace {
        labels: (0..n).map(|i| format!("x{i}")).collect(),
        dist,
        weights: units.iter().map(|&u| units_to_f64(u)).collect(),
        weight_units: Some(units),
        coords: None,
    };
    validate_space(raw).expect("shortest-path closure is a metric")
}

fn floyd_warshall(d: &mut [Vec<f64>]) {
    let n = d.len();
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][m] + d[m][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
}

/// Proportional integer units summing to exactly `UNIT_SCALE`, every
/// positive entry staying positive.
pub(crate) fn normalize_units(raw: &[u64]) -> Vec<i64> {
    let total: u64 = raw.iter().sum();
    let mut u: Vec<i64> = raw
        .iter()
        .map(|&r| if r == 0 { 0 } else { ((r as u128 * UNIT_SCALE as u128) / total as u128).max(1) as i64 })
        .collect();
    let diff = UNIT_SCALE - u.iter().sum::<i64>();
    let big = (0..u.len()).max_by_key(|&i| (u[i], core::cmp::Reverse(i))).unwrap();
    u[big] += diff;
    u
}

/// Moves the weights by at most `delta` in total variation, on the support
/// only. The metric is unchanged.
pub fn perturb_weights(space: &FiniteMMSpace, delta: f64, seed: u64) -> Result<FiniteMMSpace> {
    let pts = space.support();
    let min_weight = pts.iter().map(|&x| space.weight(x)).fold(f64::INFINITY, f64::min);
    if !(delta >= 0.0 && delta < min_weight) {
        return Err(Error::DeltaTooLarge { delta, min_weight });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shift: Vec<f64> = pts.iter().map(|_| rng.random_range(-1.0..=1.0)).collect();
    let mean = shift.iter().sum::<f64>() / shift.len() as f64;
    shift.iter_mut().for_each(|s| *s -= mean);
    let l1: f64 = shift.iter().map(|s| s.abs()).sum();
    // total variation is half the l1 norm; stay a little inside it
    let scale = if l1 > 0.0 { 0.9 * delta / l1 } else { 0.0 };
    match space.weight_units() {
        Some(units) => {
            let mut u = units.to_vec();
            for (k, &x) in pts.iter().enumerate() {
                u[x] += libm::round(shift[k] * scale * UNIT_SCALE as f64) as i64;
            }
            let diff = UNIT_SCALE - pts.iter().map(|&x| u[x]).sum::<i64>();
            let big = *pts.iter().max_by_key(|&&x| (u[x], core::cmp::Reverse(x))).unwrap();
            u[big] += diff;
            let w = u.iter().map(|&v| units_to_f64(v)).collect();
            space.with_weights(w, Some(u))
        }
        None => {
            let mut w = space.weights().to_vec();
            for (k, &x) in pts.iter().enumerate() {
                w[x] += shift[k] * scale;
            }
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= s);
            space.with_weights(w, None)
        }
    }
}

/// Spaces with weights and parameters on the `1/40` lattice, so that every
/// mass comparison between them is either tight or off by at least `1/40`.
/// Weight perturbations below that gap cannot make a family feasible.
pub fn lattice_instances(count: usize, seed: u64) -> Vec<(FiniteMMSpace, AlphaVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.random_range(2..=6usize);
        let base = random_discrete(n, rng.random(), 0.0);
        // 40 lattice steps spread over n points, each at least 2
        let mut steps = vec![2u64; n];
        for _ in 0..40 - 2 * n as u64 {
            steps[rng.random_range(0..n)] += 1;
        }
        let units: Vec<i64> = steps.iter().map(|&s| s as i64 * 25_000).collect();
        let space = base.with_weights(units.iter().map(|&u| units_to_f64(u)).collect(), Some(units)).unwrap();
        let k = rng.random_range(1..=3usize);
        let mut budget = 40u64;
        let mut alphas = Vec::with_capacity(k);
        for _ in 0..k {
            if budget == 0 {
                break;
            }
            let a = rng.random_range(1..=budget.min(20));
            budget -= a;
            alphas.push(a as i64 * 25_000);
        }
        out.push((space, AlphaVector::from_units(alphas).unwrap()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::prokhorov;
    use core::f64::consts::PI;

    #[test]
    fn sphere_distances() {
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        let m1 = [-1.0, 0.0, 0.0];
        assert_eq!(sphere_distance(&e1, &e1, 1.0), 0.0);
        assert!((sphere_distance(&e1, &m1, 1.0) - PI).abs() < 1e-12);
        assert!((sphere_distance(&e1, &e2, 1.0) - PI / 2.0).abs() < 1e-12);
        let big = [2.0, 0.0, 0.0];
        let bm = [-2.0, 0.0, 0.0];
        assert!((sphere_distance(&big, &bm, 2.0) - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn sphere_mean_distance_on_the_circle() {
        let trials = 100_000;
        let mean: f64 = (0..trials).map(|s| sphere_sample(1, 1.0, 2, s).d(0, 1)).sum::<f64>() / trials as f64;
        assert!((mean - PI / 2.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn grids() {
        let g = grid_cube(1, 2).unwrap();
        assert_eq!((g.len(), g.d(0, 1)), (2, 1.0));
        let g = grid_cube(2, 2).unwrap();
        assert!((0..4).all(|i| (0..4).all(|j| i == j || g.d(i, j) == 1.0)));
        let g = grid_cube(2, 3).unwrap();
        assert_eq!((g.len(), g.diameter()), (9, 1.0));
        assert!(matches!(grid_cube(13, 2), Err(Error::SizeLimitExceeded { .. })));
    }

    #[test]
    fn random_spaces() {
        assert_eq!(random_discrete(1, 3, 0.5).len(), 1);
        assert_eq!(random_discrete(6, 11, 0.3), random_discrete(6, 11, 0.3));
        for seed in 0..20 {
            let s = random_discrete(5, seed, 1.0);
            assert!(s.weights().iter().cloned().fold(0.0, f64::max) > 0.5);
            assert_eq!(s.weight_units().unwrap().iter().sum::<i64>(), UNIT_SCALE);
        }
    }

    #[test]
    fn perturbations() {
        let s = random_discrete(5, 4, 0.0);
        let min = s.weights().iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(matches!(perturb_weights(&s, min, 1), Err(Error::DeltaTooLarge { .. })));
        for delta in [0.01, 0.001, 0.0] {
            let p = perturb_weights(&s, delta, 9).unwrap();
            assert!(prokhorov(&s.dist_rows(), s.weights(), p.weights()).unwrap() <= delta + 1e-12);
            assert_eq!(p.support(), s.support());
            if delta == 0.0 {
                assert_eq!(p.weights(), s.weights());
            }
        }
    }

    #[test]
    fn lattice_instances_stay_on_the_lattice() {
        for (s, a) in lattice_instances(20, 5) {
            assert!(s.weight_units().unwrap().iter().all(|u| u % 25_000 == 0));
            assert!(a.units().unwrap().iter().all(|u| u % 25_000 == 0));
            assert!(a.l1_at_most_one());
        }
    }
}
