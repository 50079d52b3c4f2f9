#![allow(dead_code)]

use mmi_core::space::{validate_space, RawSpace};
use mmi_core::spaces::random_discrete;
use mmi_core::{AlphaVector, FiniteMMSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random space with between 1 and `max_points` points.
pub fn space(seed: u64, max_points: usize) -> FiniteMMSpace {
    let mut r = rng(seed ^ 0x5eed);
    let n = r.random_range(1..=max_points);
    random_discrete(n, seed, 0.3)
}

/// `k` quotas in units of `1e-6` summing to at most one.
pub fn alphas(r: &mut ChaCha8Rng, k: usize) -> AlphaVector {
    let mut u: Vec<i64> = (0..k).map(|_| r.random_range(1..=40) * 10_000).collect();
    let total: i64 = u.iter().sum();
    if total > 1_000_000 {
        u.iter_mut().for_each(|x| *x = (*x * 1_000_000 / total).max(1));
    }
    AlphaVector::from_units(u).unwrap()
}

/// A space with explicit distances and exact weights.
pub fn exact_space(dist: Vec<Vec<f64>>, units: Vec<i64>) -> FiniteMMSpace {
    let labels = (0..units.len()).map(|i| format!("p{i}")).collect();
    validate_space(RawSpace { labels, dist, weights: vec![0.0; units.len()], weight_units: Some(units), coords: None }).unwrap()
}

/// Quotient of `y` by `class`, with the largest metric below the induced
/// one; the projection is 1-Lipschitz.
pub fn quotient(y: &FiniteMMSpace, class: &[usize]) -> FiniteMMSpace {
    let m = class.iter().max().unwrap() + 1;
    let mut d = vec![vec![f64::INFINITY; m]; m];
    let mut units = vec![0i64; m];
    for a in 0..y.len() {
        units[class[a]] += y.weight_units().unwrap()[a];
        for b in 0..y.len() {
            let (p, q) = (class[a], class[b]);
            d[p][q] = d[p][q].min(if p == q { 0.0 } else { y.d(a, b) });
        }
    }
    for k in 0..m {
        for a in 0..m {
            for b in 0..m {
                d[a][b] = d[a][b].min(d[a][k] + d[k][b]);
            }
        }
    }
    exact_space(d, units)
}
