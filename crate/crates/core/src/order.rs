//! The Lipschitz order and the layered spaces that dominate a given space.
//!
//! A map between mm-spaces only matters on the support of its source, so
//! witnesses are defined there and may leave zero-weight points unmapped.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::mass::{decimal_units, quantize, with_masses, Mass, UNIT_SCALE};
use crate::solvers::flow::transport;
use crate::space::{validate_space, AlphaVector, FiniteMMSpace, RawSpace, SubProbDecomposition};

/// Slack allowed in the Lipschitz and fiber-mass checks.
pub const WITNESS_TOL: f64 = 1e-9;

/// A map from the points of a source space to the points of a target.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DominationWitness {
    /// `map[y]` for every support point `y` of the source.
    pub map: Vec<Option<usize>>,
    /// Result of [`DominationWitness::verify`] when the witness was built.
    pub checked: bool,
}

impl DominationWitness {
    pub fn new(source: &FiniteMMSpace, target: &FiniteMMSpace, map: Vec<Option<usize>>) -> Self {
        let mut w = DominationWitness { map, checked: false };
        w.checked = w.verify(source, target);
        w
    }

    /// Whether the map is defined on the source support, 1-Lipschitz and
    /// pushes the source measure onto the target measure.
    pub fn verify(&self, source: &FiniteMMSpace, target: &FiniteMMSpace) -> bool {
        if self.map.len() != source.len() {
            return false;
        }
        let mut fiber = vec![0.0; target.len()];
        for &y in source.support() {
            match self.map[y] {
                Some(x) if x < target.len() => fiber[x] += source.weight(y),
                _ => return false,
            }
        }
        if (0..target.len()).any(|x| (fiber[x] - target.weight(x)).abs() > WITNESS_TOL) {
            return false;
        }
        let defined: Vec<(usize, usize)> =
            self.map.iter().enumerate().filter_map(|(y, m)| m.map(|x| (y, x))).collect();
        defined.iter().enumerate().all(|(k, &(y, x))| {
            defined[k + 1..].iter().all(|&(y2, x2)| target.d(x, x2) <= source.d(y, y2) + WITNESS_TOL)
        })
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &DominationWitness) -> Vec<Option<usize>> {
        self.map.iter().map(|m| m.and_then(|y| next.map.get(y).copied().flatten())).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Domination {
    Witness(DominationWitness),
    /// No dominating map exists; `explored` partial assignments were tried.
    Refuted { explored: u64 },
}

impl Domination {
    pub fn witness(&self) -> Option<&DominationWitness> {
        match self {
            Domination::Witness(w) => Some(w),
            Domination::Refuted { .. } => None,
        }
    }
}

/// Decides whether `y` dominates `x`: a 1-Lipschitz map `y -> x` carrying
/// `μ_y` to `μ_x`.
pub fn dominates(y: &FiniteMMSpace, x: &FiniteMMSpace) -> Result<Domination> {
    dominates_with(y, x, &Limits::default())
}

pub fn dominates_with(y: &FiniteMMSpace, x: &FiniteMMSpace, limits: &Limits) -> Result<Domination> {
    Limits::check("dominates", y.support().len(), limits.dominates)?;
    let mut src: Vec<usize> = y.support().to_vec();
    src.sort_by(|&a, &b| y.weight(b).total_cmp(&y.weight(a)).then(a.cmp(&b)));
    let dst = x.support();
    let ws: Vec<f64> = src.iter().map(|&p| y.weight(p)).collect();
    let wsu: Option<Vec<i64>> = y.weight_units().map(|u| src.iter().map(|&p| u[p]).collect());
    let wd: Vec<f64> = dst.iter().map(|&p| x.weight(p)).collect();
    let wdu: Option<Vec<i64>> = x.weight_units().map(|u| dst.iter().map(|&p| u[p]).collect());
    let q = quantize(&ws, wsu.as_deref(), &wd, wdu.as_deref());
    let found = with_masses!(q, |ws, wd| {
        let mut s = Search { y, x, src: &src, dst, ws: &ws, cap: wd.clone(), choice: vec![0; src.len()], explored: 0 };
        let ok = s.place(0);
        (ok.then(|| s.choice.clone()), s.explored)
    });
    Ok(match found {
        (Some(choice), _) => {
            let mut map = vec![None; y.len()];
            for (k, &p) in src.iter().enumerate() {
                map[p] = Some(dst[choice[k]]);
            }
            Domination::Witness(DominationWitness::new(y, x, map))
        }
        (None, explored) => Domination::Refuted { explored },
    })
}

struct Search<'a, M> {
    y: &'a FiniteMMSpace,
    x: &'a FiniteMMSpace,
    src: &'a [usize],
    dst: &'a [usize],
    ws: &'a [M],
    cap: Vec<M>,
    choice: Vec<usize>,
    explored: u64,
}

impl<M: Mass> Search<'_, M> {
    /// Whether target `t` is consistent with the first `k` assignments for
    /// source entry `j`.
    fn compatible(&self, k: usize, j: usize, t: usize) -> bool {
        (0..k).all(|i| self.x.d(self.dst[t], self.dst[self.choice[i]]) <= self.y.d(self.src[j], self.src[i]) + WITNESS_TOL)
    }

    fn place(&mut self, k: usize) -> bool {
        self.explored += 1;
        if k == self.src.len() {
            return self.cap.iter().all(|c| !c.is_positive());
        }
        // the unassigned mass must still fit into the residual capacities
        let rest = &self.ws[k..];
        let t = transport(rest, &self.cap, |r, c| self.compatible(k, k + r, c));
        if !t.saturated {
            return false;
        }
        for c in 0..self.dst.len() {
            if !M::covers(self.cap[c], self.ws[k]) || !self.compatible(k, k, c) {
                continue;
            }
            self.choice[k] = c;
            self.cap[c] -= self.ws[k];
            let ok = self.place(k + 1);
            self.cap[c] += self.ws[k];
            if ok {
                return true;
            }
        }
        false
    }
}

/// A weight-preserving isometry between the supports, as a witness from
/// `x` to `y`, when one exists.
pub fn mm_isomorphic(x: &FiniteMMSpace, y: &FiniteMMSpace) -> Result<Option<DominationWitness>> {
    let limits = Limits::default();
    Limits::check("mm_isomorphic", x.support().len(), limits.isomorphism)?;
    Limits::check("mm_isomorphic", y.support().len(), limits.isomorphism)?;
    let (sx, sy) = (x.support(), y.support());
    if sx.len() != sy.len() {
        return Ok(None);
    }
    let same_weight = |a: usize, b: usize| match (x.weight_units(), y.weight_units()) {
        (Some(u), Some(v)) => u[a] == v[b],
        _ => (x.weight(a) - y.weight(b)).abs() <= crate::mass::MASS_TOL,
    };
    fn rec(
        k: usize,
        x: &FiniteMMSpace,
        y: &FiniteMMSpace,
        perm: &mut Vec<usize>,
        used: &mut [bool],
        same_weight: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        let (sx, sy) = (x.support(), y.support());
        if k == sx.len() {
            return true;
        }
        for c in 0..sy.len() {
            if used[c] || !same_weight(sx[k], sy[c]) {
                continue;
            }
            if (0..k).any(|i| (x.d(sx[k], sx[i]) - y.d(sy[c], sy[perm[i]])).abs() > WITNESS_TOL) {
                continue;
            }
            used[c] = true;
            perm.push(c);
            if rec(k + 1, x, y, perm, used, same_weight) {
                return true;
            }
            perm.pop();
            used[c] = false;
        }
        false
    }
    let mut perm = Vec::with_capacity(sx.len());
    let mut used = vec![false; sy.len()];
    if !rec(0, x, y, &mut perm, &mut used, &same_weight) {
        return Ok(None);
    }
    let mut map = vec![None; x.len()];
    for (k, &p) in sx.iter().enumerate() {
        map[p] = Some(sy[perm[k]]);
    }
    Ok(Some(DominationWitness::new(x, y, map)))
}

/// A layered space over `X` together with its projection onto `X`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Layered {
    /// Points `(x, level)` at index `level * |X| + x`.
    pub space: FiniteMMSpace,
    /// The projection `(x, level) -> x`.
    pub witness: DominationWitness,
    /// Pairwise disjoint point sets of the layered space, one per index.
    pub family: Vec<Vec<usize>>,
    /// Every index set is nonempty, the sets are disjoint and each carries
    /// its quota.
    pub family_ok: bool,
}

/// Builds `X × {0..n}` with `d((x,i),(y,j)) = d(x,y) + |i-j|` and the
/// measure whose level `i >= 1` holds `rows[i-1]` and level 0 holds the rest
/// of `μ_X`.
fn layered(x: &FiniteMMSpace, rows: &[Vec<f64>], row_units: Option<Vec<Vec<i64>>>) -> Result<(FiniteMMSpace, DominationWitness)> {
    let n = x.len();
    let levels = rows.len() + 1;
    let size = n * levels;
    let mut labels = Vec::with_capacity(size);
    let mut dist = vec![vec![0.0; size]; size];
    for a in 0..size {
        labels.push(format!("{}@{}", x.labels()[a % n], a / n));
        for b in 0..size {
            dist[a][b] = x.d(a % n, b % n) + (a / n).abs_diff(b / n) as f64;
        }
    }
    let units = match (x.weight_units(), row_units) {
        (Some(u), Some(ru)) => {
            let mut out = vec![0i64; size];
            for p in 0..n {
                let used: i64 = ru.iter().map(|r| r[p]).sum();
                if used > u[p] {
                    return Err(Error::CapacityViolated { point: p });
                }
                out[p] = u[p] - used;
                for (i, r) in ru.iter().enumerate() {
                    out[(i + 1) * n + p] = r[p];
                }
            }
            debug_assert_eq!(out.iter().sum::<i64>(), UNIT_SCALE);
            Some(out)
        }
        _ => None,
    };
    let mut weights = vec![0.0; size];
    for p in 0..n {
        let used: f64 = rows.iter().map(|r| r[p]).sum();
        let rest = x.weight(p) - used;
        if rest < -WITNESS_TOL {
            return Err(Error::CapacityViolated { point: p });
        }
        weights[p] = rest.max(0.0);
        for (i, r) in rows.iter().enumerate() {
            weights[(i + 1) * n + p] = r[p];
        }
    }
    let space = validate_space(RawSpace { labels, dist, weights, weight_units: units, coords: None })?;
    let map = (0..size).map(|a| Some(a % n)).collect();
    let witness = DominationWitness::new(&space, x, map);
    Ok((space, witness))
}

fn family_ok(space: &FiniteMMSpace, family: &[Vec<usize>], abar: &AlphaVector) -> bool {
    let mut seen = vec![false; space.len()];
    for (i, set) in family.iter().enumerate() {
        if set.is_empty() {
            return false;
        }
        for &p in set {
            if seen[p] {
                return false;
            }
            seen[p] = true;
        }
        let have = space.mass_of(set);
        if have < abar.values()[i] - WITNESS_TOL {
            return false;
        }
    }
    true
}

/// The dominating space in which index `i` gets its own atom of mass `α_i`
/// on level `i` above `assignment[i]`.
pub fn build_dominating_atoms(x: &FiniteMMSpace, assignment: &[usize], abar: &AlphaVector) -> Result<Layered> {
    if assignment.len() != abar.len() {
        return Err(Error::LengthMismatch { expected: abar.len(), found: assignment.len() });
    }
    let n = x.len();
    if let Some(&p) = assignment.iter().find(|&&p| p >= n) {
        return Err(Error::DegenerateInput(format!("assignment targets point {p} of a {n}-point space")));
    }
    let mut rows = vec![vec![0.0; n]; abar.len()];
    let mut row_units = abar.units().map(|_| vec![vec![0i64; n]; abar.len()]);
    for (i, &p) in assignment.iter().enumerate() {
        rows[i][p] = abar.values()[i];
        if let (Some(ru), Some(au)) = (row_units.as_mut(), abar.units()) {
            ru[i][p] = au[i];
        }
    }
    let (space, witness) = layered(x, &rows, row_units)?;
    let family: Vec<Vec<usize>> = assignment.iter().enumerate().map(|(i, &p)| vec![(i + 1) * n + p]).collect();
    let family_ok = family_ok(&space, &family, abar);
    Ok(Layered { space, witness, family, family_ok })
}

/// The dominating space in which row `i` of `dec` sits on level `i`, with
/// the family `A_i = supp μ_i × {i}`.
pub fn build_dominating_from_decomposition(
    x: &FiniteMMSpace,
    dec: &SubProbDecomposition,
    abar: &AlphaVector,
) -> Result<Layered> {
    dec.validate(x, abar)?;
    let n = x.len();
    let row_units: Option<Vec<Vec<i64>>> =
        dec.mass.iter().map(|r| r.iter().map(|&m| decimal_units(m)).collect::<Option<Vec<i64>>>()).collect();
    let (space, witness) = layered(x, &dec.mass, row_units).map_err(|e| match e {
        Error::CapacityViolated { point } => Error::InvalidDecomposition(format!("column {point} overflows its weight")),
        e => e,
    })?;
    let family: Vec<Vec<usize>> = (0..dec.mass.len()).map(|i| dec.row_support(i).iter().map(|&p| (i + 1) * n + p).collect()).collect();
    let family_ok = family_ok(&space, &family, abar);
    Ok(Layered { space, witness, family, family_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diameters::{multi_partial_diameter, underline_diam, ExtendedReal};
    use proptest::prelude::*;

    fn two(d: f64, w: [f64; 2]) -> FiniteMMSpace {
        FiniteMMSpace::from_matrix(vec![vec![0.0, d], vec![d, 0.0]], w.to_vec()).unwrap()
    }

    fn abar(v: &[f64]) -> AlphaVector {
        AlphaVector::new(v.to_vec()).unwrap()
    }

    /// Every map from the support of `y` into the points of `x`.
    fn exhaustive(y: &FiniteMMSpace, x: &FiniteMMSpace) -> bool {
        let sy = y.support();
        let k = sy.len();
        let m = x.len();
        let total = m.pow(k as u32);
        (0..total).any(|mut code| {
            let mut map = vec![None; y.len()];
            for &p in sy {
                map[p] = Some(code % m);
                code /= m;
            }
            DominationWitness::new(y, x, map).checked
        })
    }

    #[test]
    fn examples() {
        let x = two(1.0, [0.5, 0.5]);
        let one = FiniteMMSpace::one_point();
        assert!(dominates(&x, &one).unwrap().witness().unwrap().checked);
        let y = two(2.0, [0.5, 0.5]);
        assert!(dominates(&y, &x).unwrap().witness().unwrap().checked);
        assert!(exhaustive(&y, &x));
        assert!(matches!(dominates(&x, &y).unwrap(), Domination::Refuted { .. }));
        assert!(!exhaustive(&x, &y));
        let id = dominates(&x, &x).unwrap();
        assert!(id.witness().unwrap().checked);
    }

    #[test]
    fn isomorphism_examples() {
        let dist = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.5], vec![2.0, 1.5, 0.0]];
        let x = FiniteMMSpace::from_matrix(dist.clone(), vec![0.2, 0.3, 0.5]).unwrap();
        assert!(mm_isomorphic(&x, &x).unwrap().is_some());
        // relabel by the permutation (2, 0, 1)
        let p = [2usize, 0, 1];
        let pd = (0..3).map(|a| (0..3).map(|b| dist[p[a]][p[b]]).collect()).collect();
        let px = FiniteMMSpace::from_matrix(pd, vec![0.5, 0.2, 0.3]).unwrap();
        let w = mm_isomorphic(&x, &px).unwrap().unwrap();
        assert!(w.checked);
        assert_eq!(w.map, vec![Some(1), Some(2), Some(0)]);
        assert!(mm_isomorphic(&two(1.0, [0.5, 0.5]), &two(1.1, [0.5, 0.5])).unwrap().is_none());
    }

    #[test]
    fn zero_weight_points_are_ignored() {
        let dist = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 5.0], vec![5.0, 5.0, 0.0]];
        let x = FiniteMMSpace::from_matrix(dist, vec![0.5, 0.5, 0.0]).unwrap();
        let y = two(1.0, [0.5, 0.5]);
        assert!(mm_isomorphic(&x, &y).unwrap().is_some());
        assert!(dominates(&y, &x).unwrap().witness().is_some());
    }

    #[test]
    fn atoms_construction() {
        let x = two(1.0, [0.5, 0.5]).with_weights(vec![0.9, 0.1], None).unwrap();
        let a = abar(&[0.3, 0.2]);
        let l = build_dominating_atoms(&x, &[0, 0], &a).unwrap();
        assert!(l.witness.checked && l.family_ok);
        assert_eq!(l.family, vec![vec![2], vec![4]]);
        assert_eq!(l.space.weight_units().unwrap(), &[400_000, 100_000, 300_000, 0, 200_000, 0]);
        let (sub, _) = l.space.restrict_to_support();
        assert_eq!(multi_partial_diameter(&sub, &a).unwrap(), ExtendedReal::Finite(0.0));

        let one = FiniteMMSpace::one_point();
        let l = build_dominating_atoms(&one, &[0], &abar(&[1.0])).unwrap();
        assert_eq!(l.space.weights(), &[0.0, 1.0]);
        assert!(l.witness.checked && l.family_ok);

        let bad = build_dominating_atoms(&x, &[1, 1], &a).unwrap_err();
        assert!(matches!(bad, Error::CapacityViolated { point: 1 }));
    }

    #[test]
    fn decomposition_construction() {
        let x = two(1.0, [0.5, 0.5]);
        let a = abar(&[0.5, 0.5]);
        let dec = SubProbDecomposition { supports: vec![vec![0], vec![1]], mass: vec![vec![0.5, 0.0], vec![0.0, 0.5]] };
        let l = build_dominating_from_decomposition(&x, &dec, &a).unwrap();
        assert!(l.witness.checked && l.family_ok);
        assert_eq!(l.family, vec![vec![2], vec![5]]);
        assert!(l.family.iter().all(|s| l.space.set_diameter(s) == 0.0));

        let full = SubProbDecomposition { supports: vec![vec![0, 1]], mass: vec![vec![0.3, 0.3]] };
        let l = build_dominating_from_decomposition(&x, &full, &abar(&[0.6])).unwrap();
        assert_eq!(l.space.set_diameter(&l.family[0]), 1.0);

        let over = SubProbDecomposition { supports: vec![vec![0], vec![0]], mass: vec![vec![0.4, 0.0], vec![0.4, 0.0]] };
        let e = build_dominating_from_decomposition(&x, &over, &abar(&[0.4, 0.4])).unwrap_err();
        assert!(matches!(e, Error::InvalidDecomposition(_)));
    }

    #[test]
    fn decomposition_certifies_underline_diam() {
        let dist = vec![
            vec![0.0, 1.0, 2.0, 3.0],
            vec![1.0, 0.0, 1.0, 2.0],
            vec![2.0, 1.0, 0.0, 1.0],
            vec![3.0, 2.0, 1.0, 0.0],
        ];
        let x = FiniteMMSpace::from_matrix(dist, vec![0.25; 4]).unwrap();
        for v in [&[0.5, 0.5][..], &[0.4, 0.3], &[0.3, 0.3, 0.3]] {
            let a = abar(v);
            let u = underline_diam(&x, &a).unwrap();
            let dec = u.decomposition.unwrap();
            let l = build_dominating_from_decomposition(&x, &dec, &a).unwrap();
            assert!(l.witness.checked && l.family_ok);
            let (sub, _) = l.space.restrict_to_support();
            let m = multi_partial_diameter(&sub, &a).unwrap();
            assert!(m.to_f64() <= dec.max_support_diameter(&x));
            assert!(u.value.to_f64() <= m.to_f64());
        }
    }

    fn small_space() -> impl Strategy<Value = FiniteMMSpace> {
        (1usize..=4).prop_flat_map(|n| {
            (proptest::collection::vec(1u32..=4, n * n), proptest::collection::vec(1i64..=4, n)).prop_map(move |(e, w)| {
                let mut d = vec![vec![0.0; n]; n];
                for a in 0..n {
                    for b in a + 1..n {
                        d[a][b] = e[a * n + b] as f64 * 0.5;
                        d[b][a] = d[a][b];
                    }
                }
                for k in 0..n {
                    for a in 0..n {
                        for b in 0..n {
                            d[a][b] = f64::min(d[a][b], d[a][k] + d[k][b]);
                        }
                    }
                }
                let total: i64 = w.iter().sum();
                let mut u: Vec<i64> = w.iter().map(|&x| x * 1_000_000 / total).collect();
                u[0] += 1_000_000 - u.iter().sum::<i64>();
                let labels = (0..n).map(|i| format!("p{i}")).collect();
                validate_space(RawSpace { labels, dist: d, weights: vec![0.0; n], weight_units: Some(u), coords: None }).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn matches_exhaustive_search(y in small_space(), x in small_space()) {
            let r = dominates(&y, &x).unwrap();
            prop_assert_eq!(r.witness().is_some(), exhaustive(&y, &x));
            if let Some(w) = r.witness() {
                prop_assert!(w.checked);
            }
        }

        #[test]
        fn reflexive_and_transitive(z in small_space(), y in small_space(), x in small_space()) {
            prop_assert!(dominates(&x, &x).unwrap().witness().is_some());
            if let (Some(g), Some(f)) = (dominates(&z, &y).unwrap().witness().cloned(), dominates(&y, &x).unwrap().witness().cloned()) {
                let h = DominationWitness::new(&z, &x, g.then(&f));
                prop_assert!(h.checked);
                prop_assert!(dominates(&z, &x).unwrap().witness().is_some());
            }
        }
    }
}
