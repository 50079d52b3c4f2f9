use alloc::vec::Vec;

use crate::clique::max_weight_clique;
use crate::limits::PARTIAL_DIAMETER_CAP;
use crate::metrics::ky_fan;
use crate::space::{mcshane_extension, FiniteMMSpace, LipschitzField};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Repair {
    pub field: LipschitzField,
    /// The support points kept as anchors.
    pub anchors: Vec<usize>,
    /// `d_KF(f, f̃)`.
    pub ky_fan: f64,
    /// Whether the Ky Fan distance is within `eps`.
    pub within_eps: bool,
}

/// A 1-Lipschitz field close to `f` in the Ky Fan metric.
///
/// Keeps a heaviest set of support points on which `f` has Lipschitz defect
/// at most `eps` (exact up to 64 support points, greedy by weight beyond)
/// and extends `f` from it by `x -> min_y f(y) + d(x, y)`.
pub fn lipschitz_repair(space: &FiniteMMSpace, f: &[f64], eps: f64) -> crate::Result<Repair> {
    if f.len() != space.len() {
        return Err(crate::Error::LengthMismatch { expected: space.len(), found: f.len() });
    }
    let pts = space.support();
    let compatible = |x: usize, y: usize| (f[x] - f[y]).abs() - space.d(x, y) <= eps + 1e-12;
    let anchors: Vec<usize> = if pts.len() <= PARTIAL_DIAMETER_CAP {
        let adj: Vec<u64> = pts
            .iter()
            .map(|&x| pts.iter().enumerate().filter(|&(_, &y)| compatible(x, y)).fold(0u64, |m, (b, _)| m | 1 << b))
            .collect();
        let w: Vec<f64> = pts.iter().map(|&x| space.weight(x)).collect();
        let mask = max_weight_clique(&adj, &w, crate::clique::full_mask(pts.len()));
        (0..pts.len()).filter(|&a| mask >> a & 1 == 1).map(|a| pts[a]).collect()
    } else {
        let mut order = pts.to_vec();
        order.sort_by(|&a, &b| space.weight(b).total_cmp(&space.weight(a)).then(a.cmp(&b)));
        let mut kept: Vec<usize> = Vec::new();
        for x in order {
            if kept.iter().all(|&y| compatible(x, y)) {
                kept.push(x);
            }
        }
        kept.sort_unstable();
        kept
    };
    let values = mcshane_extension(space, &anchors, f);
    let d = ky_fan(space.weights(), f, &values)?;
    Ok(Repair {
        field: LipschitzField::one_lipschitz(space, values)?,
        anchors,
        ky_fan: d,
        within_eps: d <= eps + 1e-12,
    })
}
