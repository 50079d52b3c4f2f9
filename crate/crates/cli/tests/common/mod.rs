#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

use mmi_core::FiniteMMSpace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn mmi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmi")).args(args).env_remove("MMI_CAP_OVERRIDE").output().expect("binary runs")
}

/// A space on `n` points whose weights are multiples of `1/k`.
pub fn cell_space(r: &mut ChaCha8Rng, n: usize, k: usize) -> FiniteMMSpace {
    let mut cells = vec![1usize; n];
    for _ in n..k {
        cells[r.random_range(0..n)] += 1;
    }
    let mut d = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            d[a][b] = r.random_range(1..=8) as f64 * 0.25;
            d[b][a] = d[a][b];
        }
    }
    for m in 0..n {
        for a in 0..n {
            for b in 0..n {
                d[a][b] = f64::min(d[a][b], d[a][m] + d[m][b]);
            }
        }
    }
    FiniteMMSpace::from_matrix(d, cells.iter().map(|&c| c as f64 / k as f64).collect()).unwrap()
}

fn cells_of(s: &FiniteMMSpace, k: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for x in 0..s.len() {
        let c = (s.weight(x) * k as f64).round() as usize;
        out.extend(std::iter::repeat_n(x, c));
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Box distance over parameters constant on the `k` cells of the unit
/// interval: every arrangement of the second parameter against the first,
/// and every union of cells as the good set.
pub fn discretized_box(x: &FiniteMMSpace, y: &FiniteMMSpace, k: usize) -> f64 {
    let phi = cells_of(x, k);
    let mut psi = cells_of(y, k);
    let mut best: f64 = 1.0;
    loop {
        for set in 1u32..(1 << k) {
            let mut dis: f64 = 0.0;
            for a in 0..k {
                for b in a + 1..k {
                    if set >> a & 1 == 1 && set >> b & 1 == 1 {
                        dis = dis.max((x.d(phi[a], phi[b]) - y.d(psi[a], psi[b])).abs());
                    }
                }
            }
            let miss = 1.0 - set.count_ones() as f64 / k as f64;
            best = best.min(dis.max(miss));
        }
        if !next_permutation(&mut psi) {
            return best;
        }
    }
}
