//! Bitmask clique searches on graphs with at most 64 vertices.

use crate::mass::Mass;

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn mask_mass<M: Mass>(w: &[M], mut mask: u64) -> M {
    let mut s = M::ZERO;
    while mask != 0 {
        s += w[mask.trailing_zeros() as usize];
        mask &= mask - 1;
    }
    s
}

/// Whether the graph has a clique of weight at least `quota`. Adjacency
/// masks include the vertex itself.
pub(crate) fn heavy_clique<M: Mass>(adj: &[u64], w: &[M], quota: M) -> bool {
    fn extend<M: Mass>(adj: &[u64], w: &[M], mut cand: u64, cur: M, quota: M) -> bool {
        if M::covers(cur, quota) {
            return true;
        }
        while cand != 0 {
            if !M::covers(cur + mask_mass(w, cand), quota) {
                return false;
            }
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            if extend(adj, w, cand & adj[v], cur + w[v], quota) {
                return true;
            }
        }
        false
    }
    extend(adj, w, full_mask(adj.len()), M::ZERO, quota)
}

/// A clique of maximum total weight among the vertices of `allowed`.
pub(crate) fn max_weight_clique(adj: &[u64], w: &[f64], allowed: u64) -> u64 {
    fn extend(adj: &[u64], w: &[f64], mut cand: u64, cur: u64, cur_w: f64, best: &mut (u64, f64)) {
        if cur_w > best.1 {
            *best = (cur, cur_w);
        }
        while cand != 0 {
            if cur_w + mask_mass(w, cand) <= best.1 {
                return;
            }
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            extend(adj, w, cand & adj[v], cur | 1 << v, cur_w + w[v], best);
        }
    }
    let mut best = (0u64, f64::NEG_INFINITY);
    extend(adj, w, allowed, 0, 0.0, &mut best);
    best.0
}
