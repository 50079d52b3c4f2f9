//! Order cones of 1-Lipschitz functions.
//!
//! A cone is an ordered list of blocks of support points. Functions in the
//! cone are constant on blocks and nondecreasing along the list, so they are
//! parameterized by the nonnegative gaps between consecutive blocks. Spans
//! `f(last) - f(first)` of block ranges are linear in the gaps.

use alloc::vec;
use alloc::vec::Vec;

use crate::solvers::{lp_maximin, LinearProgram};
use crate::space::FiniteMMSpace;

/// Slack below which an LP bound does not beat the incumbent.
pub(crate) const BOUND_TOL: f64 = 1e-9;

pub(crate) struct Cone {
    pub blocks: Vec<Vec<usize>>,
    /// `limit[a][b]`: largest admissible `f(b) - f(a)`, the least distance
    /// between the two blocks.
    pub limit: Vec<Vec<f64>>,
    /// Block pairs whose constraint is not implied through an intermediate
    /// block.
    rows: Vec<(usize, usize)>,
}

impl Cone {
    pub fn new(space: &FiniteMMSpace, blocks: Vec<Vec<usize>>) -> Self {
        let m = blocks.len();
        let mut limit = vec![vec![0.0; m]; m];
        for a in 0..m {
            for b in a + 1..m {
                let mut d = f64::INFINITY;
                for &x in &blocks[a] {
                    for &y in &blocks[b] {
                        d = d.min(space.d(x, y));
                    }
                }
                limit[a][b] = d;
                limit[b][a] = d;
            }
        }
        let mut rows = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                let implied = (a + 1..b).any(|c| limit[a][c] + limit[c][b] <= limit[a][b]);
                if !implied {
                    rows.push((a, b));
                }
            }
        }
        Cone { blocks, limit, rows }
    }

    pub fn from_order(space: &FiniteMMSpace, order: &[usize]) -> Self {
        Self::new(space, order.iter().map(|&x| vec![x]).collect())
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    /// Maximizes the least span over `windows`, never above `cap`.
    pub fn maximin(&self, windows: &[(usize, usize)], cap: f64) -> Option<(f64, Vec<f64>)> {
        let m = self.len();
        if m <= 1 {
            return Some((0.0, Vec::new()));
        }
        let nv = m - 1;
        let mut lp = LinearProgram::new(nv);
        lp.nonneg = vec![true; nv];
        for &(a, b) in &self.rows {
            let mut c = vec![0.0; nv];
            c[a..b].iter_mut().for_each(|v| *v = 1.0);
            lp.constrain(c, self.limit[a][b]);
        }
        for &(a, b) in windows {
            let mut c = vec![0.0; nv];
            c[a..b].iter_mut().for_each(|v| *v = 1.0);
            lp.piece(c, 0.0);
        }
        if cap.is_finite() {
            lp.piece(vec![0.0; nv], cap);
        }
        let sol = lp_maximin(&lp).ok()?;
        let gaps: Vec<f64> = sol.point.iter().map(|g| g.max(0.0)).collect();
        Some((sol.value, gaps))
    }

    /// Block positions from gaps, starting at zero.
    pub fn positions(&self, gaps: &[f64]) -> Vec<f64> {
        let mut pos = Vec::with_capacity(self.len());
        let mut acc = 0.0;
        pos.push(0.0);
        for g in gaps {
            acc += g;
            pos.push(acc);
        }
        pos
    }

    /// Strictly increasing admissible gaps.
    pub fn interior_gaps(&self) -> Vec<f64> {
        let m = self.len();
        let mut least = f64::INFINITY;
        for a in 0..m {
            for b in a + 1..m {
                least = least.min(self.limit[a][b]);
            }
        }
        vec![least / (2.0 * m as f64); m.saturating_sub(1)]
    }

    /// Moves `gaps` a little towards the interior, separating tied blocks.
    pub fn nudge_inward(&self, gaps: &[f64], eps: f64) -> Vec<f64> {
        let inner = self.interior_gaps();
        gaps.iter().zip(&inner).map(|(g, h)| (1.0 - eps) * g + eps * h).collect()
    }

    /// Values on the whole space: block positions on the support, extended
    /// by the McShane formula elsewhere.
    pub fn field(&self, space: &FiniteMMSpace, gaps: &[f64]) -> Vec<f64> {
        let pos = self.positions(gaps);
        let mut f = vec![0.0; space.len()];
        let mut anchors = Vec::new();
        for (k, block) in self.blocks.iter().enumerate() {
            for &x in block {
                f[x] = pos[k];
                anchors.push(x);
            }
        }
        crate::space::mcshane_extension(space, &anchors, &f)
    }
}

/// Calls `visit` with every permutation of `items` whose first entry is
/// smaller than its last (one of each reversal pair).
pub(crate) fn for_each_order(items: &[usize], mut visit: impl FnMut(&[usize])) {
    let n = items.len();
    if n <= 1 {
        visit(items);
        return;
    }
    let mut perm = items.to_vec();
    perm.sort_unstable();
    loop {
        if perm[0] < perm[n - 1] {
            visit(&perm);
        }
        let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else {
            return;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
}

/// Calls `visit` with every ordered set partition of `items`, one of each
/// reversal pair (single-block partitions included once).
pub(crate) fn for_each_weak_order(items: &[usize], mut visit: impl FnMut(&[Vec<usize>])) {
    let n = items.len();
    if n == 0 {
        return;
    }
    // rank[k] is the block of items[k]; enumerate surjections onto 0..m
    let mut rank = vec![0usize; n];
    fn rec(k: usize, m: usize, used: &mut Vec<usize>, rank: &mut [usize], items: &[usize], visit: &mut dyn FnMut(&[Vec<usize>])) {
        let n = items.len();
        if k == n {
            if used.iter().all(|&c| c > 0) {
                let mut blocks = vec![Vec::new(); m];
                for (i, &r) in rank.iter().enumerate() {
                    blocks[r].push(items[i]);
                }
                // canonical representative of the reversal pair
                let rev: Vec<Vec<usize>> = blocks.iter().rev().cloned().collect();
                if blocks <= rev {
                    visit(&blocks);
                }
            }
            return;
        }
        // prune: remaining items must fill the empty blocks
        let empty = used.iter().filter(|&&c| c == 0).count();
        if empty > n - k {
            return;
        }
        for r in 0..m {
            rank[k] = r;
            used[r] += 1;
            rec(k + 1, m, used, rank, items, visit);
            used[r] -= 1;
        }
    }
    for m in 1..=n {
        let mut used = vec![0usize; m];
        rec(0, m, &mut used, &mut rank, items, &mut visit);
    }
}
