//! `u-diam` of a measure on the real line.
//!
//! On the line the supports can be taken to be windows of consecutive atoms.
//! For a fixed order of the indices, a left-to-right greedy places each index
//! at the earliest window that still holds its quota and consumes the
//! leftmost remaining mass there. Trying every index order decides a
//! threshold exactly; this is cross-checked against the general clique and
//! flow search in the tests.

use alloc::vec;
use alloc::vec::Vec;

use super::ExtendedReal;
use crate::error::Result;
use crate::mass::{quantize, sum, with_masses, Mass};
use crate::space::{AlphaVector, Measure1D};

/// Windows `[start, end]` of atom indices, one per index of the parameter.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LineFamily {
    pub value: ExtendedReal,
    pub windows: Vec<(usize, usize)>,
}

pub fn line_underline_diam(m: &Measure1D, abar: &AlphaVector) -> Result<LineFamily> {
    let pos: Vec<f64> = m.atoms().iter().map(|a| a.0).collect();
    let w: Vec<f64> = m.atoms().iter().map(|a| a.1).collect();
    let q = quantize(&w, m.units(), abar.values(), abar.units());
    Ok(with_masses!(q, |w, q| match line_min_span(&pos, &w, &q) {
        Some((v, windows)) => LineFamily { value: ExtendedReal::Finite(v), windows },
        None => LineFamily { value: ExtendedReal::Infinite, windows: Vec::new() },
    }))
}

/// Smallest span admitting a family, with its windows. `None` when the
/// quotas exceed the total mass.
pub(crate) fn line_min_span<M: Mass>(pos: &[f64], w: &[M], q: &[M]) -> Option<(f64, Vec<(usize, usize)>)> {
    let n = pos.len();
    if !M::covers(sum(w.iter().copied()), sum(q.iter().copied())) {
        return None;
    }
    let mut spans: Vec<f64> = Vec::with_capacity(n * n / 2 + 1);
    spans.push(0.0);
    for a in 0..n {
        for b in a + 1..n {
            spans.push(pos[b] - pos[a]);
        }
    }
    spans.sort_by(f64::total_cmp);
    spans.dedup();
    let perms = index_orders(q);
    let reach = |t: f64| {
        let mut ends = vec![0usize; n];
        let mut b = 0;
        for a in 0..n {
            b = b.max(a);
            while b + 1 < n && pos[b + 1] - pos[a] <= t {
                b += 1;
            }
            ends[a] = b;
        }
        ends
    };
    let (mut lo, mut hi) = (0usize, spans.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if line_decide(w, q, &reach(spans[mid]), &perms).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let windows = line_decide(w, q, &reach(spans[lo]), &perms)?;
    Some((spans[lo], windows))
}

/// Index orders to try, skipping reorderings of equal quotas.
pub(crate) fn index_orders<M: Mass>(q: &[M]) -> Vec<Vec<usize>> {
    let n = q.len();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let canonical = (0..n).all(|a| (a + 1..n).all(|b| q[perm[a]] != q[perm[b]] || perm[a] < perm[b]));
        if canonical {
            out.push(perm.clone());
        }
        // next permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
}

/// Decides feasibility when a window starting at atom `a` may extend to
/// `ends[a]`; `ends` must be nondecreasing.
pub(crate) fn line_decide<M: Mass>(w: &[M], q: &[M], ends: &[usize], perms: &[Vec<usize>]) -> Option<Vec<(usize, usize)>> {
    let n = w.len();
    let mut rem = vec![M::ZERO; n];
    let mut windows = vec![(0usize, 0usize); q.len()];
    'perm: for perm in perms {
        rem.copy_from_slice(w);
        let mut s = 0;
        for &i in perm {
            loop {
                while s < n && !rem[s].is_positive() {
                    s += 1;
                }
                if s >= n {
                    continue 'perm;
                }
                let avail = sum(rem[s..=ends[s]].iter().copied());
                if M::covers(avail, q[i]) {
                    break;
                }
                s += 1;
            }
            let mut need = q[i];
            let mut e = s;
            for x in s..=ends[s] {
                if !need.is_positive() {
                    break;
                }
                let take = need.min_of(rem[x]);
                if take.is_positive() {
                    rem[x] -= take;
                    need -= take;
                    e = x;
                }
            }
            windows[i] = (s, e);
        }
        return Some(windows);
    }
    None
}
