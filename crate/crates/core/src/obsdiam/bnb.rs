//! Branch and bound for `max_g min_F max_{w in F} span_w(g)` on one cone.
//!
//! `F` ranges over the feasible families of windows; an oracle returns, for
//! fixed gaps, the optimal family and its value. A node fixes a set `H` of
//! windows whose spans must all reach `t`, and its LP maximizes `t`. When the
//! oracle family at the LP optimum is shorter than `t`, one of its windows
//! has to grow, which gives the children.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::cone::{Cone, BOUND_TOL};

pub(crate) type Window = (usize, usize);

/// Improves on `best` inside `cone`, never exceeding `cap`. Returns the new
/// value with its gaps, or `None` when `best` stands.
pub(crate) fn maximize(
    cone: &Cone,
    cap: f64,
    best: f64,
    mut oracle: impl FnMut(&[f64]) -> (f64, Vec<Window>),
) -> Option<(f64, Vec<f64>)> {
    let mut best = best;
    let mut found = None;
    let mut seen: BTreeSet<Vec<Window>> = BTreeSet::new();
    let mut stack: Vec<Vec<Window>> = vec![Vec::new()];
    while let Some(h) = stack.pop() {
        let Some((t, gaps)) = cone.maximin(&h, cap) else {
            continue;
        };
        if t <= best + BOUND_TOL {
            continue;
        }
        let (v, family) = oracle(&gaps);
        if v > best + BOUND_TOL {
            best = v;
            found = Some((v, gaps));
        }
        if v >= t - BOUND_TOL {
            continue;
        }
        for w in family {
            if w.0 < w.1 && !h.contains(&w) {
                let mut child = h.clone();
                child.push(w);
                child.sort_unstable();
                if seen.insert(child.clone()) {
                    stack.push(child);
                }
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::FiniteMMSpace;

    #[test]
    fn picks_the_longer_of_two_windows() {
        // path 0 - 1 - 2 with unit steps; the family is the single window
        // with the shorter span, so the optimum balances both gaps
        let dist = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]];
        let s = FiniteMMSpace::from_matrix(dist, vec![1.0 / 3.0; 3]).unwrap();
        let cone = Cone::from_order(&s, &[0, 1, 2]);
        let oracle = |g: &[f64]| if g[0] <= g[1] { (g[0], vec![(0, 1)]) } else { (g[1], vec![(1, 2)]) };
        let (v, g) = maximize(&cone, 5.0, 0.0, oracle).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        assert!((g[0] - 1.0).abs() < 1e-9 && (g[1] - 1.0).abs() < 1e-9);
    }
}
