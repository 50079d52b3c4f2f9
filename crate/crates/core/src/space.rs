//! Finite mm-spaces and the small value types built on top of them.
//!
//! A [`FiniteMMSpace`] is a labeled finite metric space with a probability
//! vector. Zero-weight points are kept in the data but never belong to the
//! support, and every invariant in this crate only looks at the support.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result, Violation};
use crate::mass::{decimal_units, units_to_f64, UNIT_SCALE};

/// Tolerance for symmetry and the triangle inequality.
pub const METRIC_TOL: f64 = 1e-9;
/// Tolerance for the weights summing to one in float mode.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Two pushforward values closer than this are one atom.
pub const MERGE_TOL: f64 = 1e-12;

/// Unvalidated input for [`validate_space`].
#[derive(Debug, Clone, Default)]
pub struct RawSpace {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Exact weights in units of `1e-6`, when the source carried decimals.
    pub weight_units: Option<Vec<i64>>,
    pub coords: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FiniteMMSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    weights: Vec<f64>,
    units: Option<Vec<i64>>,
    coords: Option<Vec<Vec<f64>>>,
    support: Vec<usize>,
}

/// Checks every invariant of a candidate space and reports all violations.
pub fn validate_space(raw: RawSpace) -> Result<FiniteMMSpace> {
    let n = raw.labels.len();
    let mut bad = Vec::new();
    if n == 0 {
        bad.push(Violation::Empty);
        return Err(Error::InvalidSpace(bad));
    }
    if raw.weights.len() != n {
        bad.push(Violation::ShapeMismatch { expected: n, found: raw.weights.len() });
    }
    if raw.dist.len() != n {
        bad.push(Violation::ShapeMismatch { expected: n, found: raw.dist.len() });
    }
    for row in &raw.dist {
        if row.len() != n {
            bad.push(Violation::ShapeMismatch { expected: n, found: row.len() });
        }
    }
    if let Some(c) = &raw.coords {
        if c.len() != n {
            bad.push(Violation::ShapeMismatch { expected: n, found: c.len() });
        }
    }
    if let Some(u) = &raw.weight_units {
        if u.len() != n {
            bad.push(Violation::ShapeMismatch { expected: n, found: u.len() });
        }
    }
    if !bad.is_empty() {
        return Err(Error::InvalidSpace(bad));
    }

    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let d = raw.dist[i][j];
            if !d.is_finite() {
                bad.push(Violation::NonFinite { row: i, col: j });
            } else if d < 0.0 {
                bad.push(Violation::NegativeEntry { row: i, col: j });
            }
            dist[i * n + j] = d;
        }
    }
    if bad.is_empty() {
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                bad.push(Violation::NonZeroDiagonal { index: i });
            }
            for j in (i + 1)..n {
                if (dist[i * n + j] - dist[j * n + i]).abs() > METRIC_TOL {
                    bad.push(Violation::AsymmetricMatrix { x: i, y: j });
                }
            }
        }
    }
    if bad.is_empty() {
        for x in 0..n {
            for y in 0..n {
                if y == x {
                    continue;
                }
                let dxy = dist[x * n + y];
                for z in 0..n {
                    if z == x || z == y {
                        continue;
                    }
                    if dist[x * n + z] > dxy + dist[y * n + z] + METRIC_TOL {
                        bad.push(Violation::TriangleViolation { x, y, z });
                    }
                }
            }
        }
    }

    let units = match raw.weight_units {
        Some(u) => Some(u),
        None => raw.weights.iter().map(|&w| decimal_units(w)).collect(),
    };
    let mut weights = raw.weights;
    if let Some(u) = &units {
        for (i, &x) in u.iter().enumerate() {
            if x < 0 {
                bad.push(Violation::NegativeWeight { index: i });
            }
            weights[i] = units_to_f64(x);
        }
    } else {
        for (i, &w) in weights.iter().enumerate() {
            if !(w >= 0.0) {
                bad.push(Violation::NegativeWeight { index: i });
            }
        }
    }
    let units = units.filter(|u| u.iter().sum::<i64>() == UNIT_SCALE);
    if units.is_none() {
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > WEIGHT_SUM_TOL {
            bad.push(Violation::WeightsNotProbability { sum: s });
        }
    }
    if !bad.is_empty() {
        return Err(Error::InvalidSpace(bad));
    }
    let support = (0..n).filter(|&i| weights[i] > 0.0).collect();
    Ok(FiniteMMSpace { labels: raw.labels, dist, weights, units, coords: raw.coords, support })
}

impl FiniteMMSpace {
    /// Validating constructor from a matrix and weights.
    pub fn new(labels: Vec<String>, dist: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        validate_space(RawSpace { labels, dist, weights, ..Default::default() })
    }

    /// Points labeled `p0, p1, ...`.
    pub fn from_matrix(dist: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let labels = (0..weights.len()).map(|i| format!("p{i}")).collect();
        Self::new(labels, dist, weights)
    }

    pub fn one_point() -> Self {
        Self::from_matrix(vec![vec![0.0]], vec![1.0]).expect("one-point space is valid")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn d(&self, x: usize, y: usize) -> f64 {
        self.dist[x * self.labels.len() + y]
    }

    pub fn dist_rows(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n).map(|i| self.dist[i * n..(i + 1) * n].to_vec()).collect()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }

    /// Exact weights in units of `1e-6`, when every weight is such a decimal.
    pub fn weight_units(&self) -> Option<&[i64]> {
        self.units.as_deref()
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    /// Positive-weight points in index order.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn diameter(&self) -> f64 {
        let s = &self.support;
        let mut m: f64 = 0.0;
        for (a, &x) in s.iter().enumerate() {
            for &y in &s[a + 1..] {
                m = m.max(self.d(x, y));
            }
        }
        m
    }

    /// Diameter of an arbitrary point set.
    pub fn set_diameter(&self, points: &[usize]) -> f64 {
        let mut m: f64 = 0.0;
        for (a, &x) in points.iter().enumerate() {
            for &y in &points[a + 1..] {
                m = m.max(self.d(x, y));
            }
        }
        m
    }

    /// The space restricted to its support, plus the original index of each
    /// retained point.
    pub fn restrict_to_support(&self) -> (FiniteMMSpace, Vec<usize>) {
        let idx = self.support.clone();
        (self.subspace(&idx), idx)
    }

    /// Subspace on `points`, keeping their weights (renormalization is not
    /// applied, so callers pass full-mass subsets).
    fn subspace(&self, points: &[usize]) -> FiniteMMSpace {
        let m = points.len();
        let mut dist = vec![0.0; m * m];
        for (a, &x) in points.iter().enumerate() {
            for (b, &y) in points.iter().enumerate() {
                dist[a * m + b] = self.d(x, y);
            }
        }
        FiniteMMSpace {
            labels: points.iter().map(|&i| self.labels[i].clone()).collect(),
            dist,
            weights: points.iter().map(|&i| self.weights[i]).collect(),
            units: self.units.as_ref().map(|u| points.iter().map(|&i| u[i]).collect()),
            coords: self.coords.as_ref().map(|c| points.iter().map(|&i| c[i].clone()).collect()),
            support: (0..m).filter(|&a| self.weights[points[a]] > 0.0).collect(),
        }
    }

    /// Same points and measure, distances multiplied by `t > 0`.
    pub fn scaled(&self, t: f64) -> FiniteMMSpace {
        let mut out = self.clone();
        for d in &mut out.dist {
            *d *= t;
        }
        if let Some(c) = &mut out.coords {
            for p in c.iter_mut() {
                for v in p.iter_mut() {
                    *v *= t;
                }
            }
        }
        out
    }

    /// Same metric with a different probability vector.
    pub fn with_weights(&self, weights: Vec<f64>, units: Option<Vec<i64>>) -> Result<FiniteMMSpace> {
        validate_space(RawSpace {
            labels: self.labels.clone(),
            dist: self.dist_rows(),
            weights,
            weight_units: units,
            coords: self.coords.clone(),
        })
    }

    pub fn with_coords(mut self, coords: Vec<Vec<f64>>) -> Result<FiniteMMSpace> {
        if coords.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found: coords.len() });
        }
        self.coords = Some(coords);
        Ok(self)
    }

    /// Total weight of a point set.
    pub fn mass_of(&self, points: &[usize]) -> f64 {
        points.iter().map(|&i| self.weights[i]).sum()
    }

    /// True when `other` has the same labels and distances.
    pub fn same_metric(&self, other: &FiniteMMSpace) -> bool {
        self.labels == other.labels
            && self.dist.iter().zip(&other.dist).all(|(a, b)| (a - b).abs() <= METRIC_TOL)
    }
}

/// Positive-weight points sorted by mass, heaviest first, ties by index.
pub fn atoms(space: &FiniteMMSpace) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = space.support().iter().map(|&i| (i, space.weight(i))).collect();
    match space.weight_units() {
        Some(u) => out.sort_by(|a, b| u[b.0].cmp(&u[a.0]).then(a.0.cmp(&b.0))),
        None => out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))),
    }
    out
}

/// A finitely supported probability measure on the real line.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Measure1D {
    atoms: Vec<(f64, f64)>,
    units: Option<Vec<i64>>,
}

impl Measure1D {
    /// Builds a measure from `(position, mass)` pairs in any order; equal
    /// positions are merged.
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        let units: Option<Vec<i64>> = pairs.iter().map(|p| decimal_units(p.1)).collect();
        Self::build(pairs, units)
    }

    fn build(mut pairs: Vec<(f64, f64)>, units: Option<Vec<i64>>) -> Result<Self> {
        if pairs.iter().any(|p| !p.0.is_finite() || !(p.1 >= 0.0)) {
            return Err(Error::DegenerateInput("atoms need finite positions and nonnegative masses".into()));
        }
        let mut idx: Vec<usize> = (0..pairs.len()).collect();
        idx.sort_by(|&a, &b| pairs[a].0.total_cmp(&pairs[b].0));
        let mut atoms: Vec<(f64, f64)> = Vec::new();
        let mut au: Vec<i64> = Vec::new();
        let mut group_start = f64::NEG_INFINITY;
        for &i in &idx {
            let (x, m) = pairs[i];
            let u = units.as_ref().map(|u| u[i]).unwrap_or(0);
            if m == 0.0 {
                continue;
            }
            if !atoms.is_empty() && x - group_start <= MERGE_TOL {
                let last = atoms.last_mut().unwrap();
                last.1 += m;
                *au.last_mut().unwrap() += u;
            } else {
                group_start = x;
                atoms.push((x, m));
                au.push(u);
            }
        }
        pairs.clear();
        let units = units.map(|_| au).filter(|u| u.iter().sum::<i64>() == UNIT_SCALE);
        match &units {
            Some(u) => {
                for (a, &x) in atoms.iter_mut().zip(u) {
                    a.1 = units_to_f64(x);
                }
            }
            None => {
                let s: f64 = atoms.iter().map(|a| a.1).sum();
                if (s - 1.0).abs() > WEIGHT_SUM_TOL {
                    return Err(Error::InvalidSpace(vec![Violation::WeightsNotProbability { sum: s }]));
                }
            }
        }
        if atoms.is_empty() {
            return Err(Error::InvalidSpace(vec![Violation::Empty]));
        }
        Ok(Measure1D { atoms, units })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn units(&self) -> Option<&[i64]> {
        self.units.as_deref()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// The measure as a finite mm-space on its atoms.
    pub fn to_space(&self) -> FiniteMMSpace {
        let n = self.atoms.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = (self.atoms[i].0 - self.atoms[j].0).abs();
            }
        }
        FiniteMMSpace {
            labels: self.atoms.iter().map(|a| format!("{}", a.0)).collect(),
            dist,
            weights: self.atoms.iter().map(|a| a.1).collect(),
            units: self.units.clone(),
            coords: Some(self.atoms.iter().map(|a| vec![a.0]).collect()),
            support: (0..n).collect(),
        }
    }
}

/// The parameter vector of the multivariable diameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlphaVector {
    alphas: Vec<f64>,
    units: Option<Vec<i64>>,
}

impl AlphaVector {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() || alphas.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidAlphaVector);
        }
        let units = alphas.iter().map(|&a| decimal_units(a)).collect();
        Ok(AlphaVector { alphas, units })
    }

    pub fn from_units(units: Vec<i64>) -> Result<Self> {
        if units.is_empty() || units.iter().any(|&u| u <= 0) {
            return Err(Error::InvalidAlphaVector);
        }
        let alphas = units.iter().map(|&u| units_to_f64(u)).collect();
        Ok(AlphaVector { alphas, units: Some(units) })
    }

    pub fn values(&self) -> &[f64] {
        &self.alphas
    }

    pub fn units(&self) -> Option<&[i64]> {
        self.units.as_deref()
    }

    /// `n(ᾱ)`.
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn l1(&self) -> f64 {
        match &self.units {
            Some(u) => units_to_f64(u.iter().sum()),
            None => self.alphas.iter().sum(),
        }
    }

    pub fn linf(&self) -> f64 {
        self.alphas.iter().cloned().fold(0.0, f64::max)
    }

    /// Whether `Σ α_i <= 1` (exactly when possible, else within 1e-12).
    pub fn l1_at_most_one(&self) -> bool {
        match &self.units {
            Some(u) => u.iter().sum::<i64>() <= UNIT_SCALE,
            None => self.l1() <= 1.0 + WEIGHT_SUM_TOL,
        }
    }
}

/// A real function on the points of a space with a Lipschitz bound.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LipschitzField {
    values: Vec<f64>,
    lipschitz_bound: f64,
}

impl LipschitzField {
    /// Checks `|f(x) - f(y)| <= bound * d(x, y)` for all pairs.
    pub fn new(space: &FiniteMMSpace, values: Vec<f64>, bound: f64) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch { expected: space.len(), found: values.len() });
        }
        for x in 0..values.len() {
            for y in (x + 1)..values.len() {
                if (values[x] - values[y]).abs() > bound * space.d(x, y) + METRIC_TOL {
                    return Err(Error::NotLipschitz { x, y, bound });
                }
            }
        }
        Ok(LipschitzField { values, lipschitz_bound: bound })
    }

    pub fn one_lipschitz(space: &FiniteMMSpace, values: Vec<f64>) -> Result<Self> {
        Self::new(space, values, 1.0)
    }

    pub fn constant(space: &FiniteMMSpace, c: f64) -> Self {
        LipschitzField { values: vec![c; space.len()], lipschitz_bound: 1.0 }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }
}

/// Smallest 1-Lipschitz majorant-free extension `x -> min_y f(y) + d(x, y)`
/// over the anchor points.
pub fn mcshane_extension(space: &FiniteMMSpace, anchors: &[usize], f: &[f64]) -> Vec<f64> {
    (0..space.len())
        .map(|x| anchors.iter().map(|&y| f[y] + space.d(x, y)).fold(f64::INFINITY, f64::min))
        .collect()
}

/// Pushforward of the measure of `space` under `f`.
pub fn pushforward(space: &FiniteMMSpace, f: &LipschitzField) -> Result<Measure1D> {
    pushforward_values(space, f.values())
}

/// Pushforward under an arbitrary real field.
pub fn pushforward_values(space: &FiniteMMSpace, f: &[f64]) -> Result<Measure1D> {
    if f.len() != space.len() {
        return Err(Error::LengthMismatch { expected: space.len(), found: f.len() });
    }
    let pairs = space.support().iter().map(|&i| (f[i], space.weight(i))).collect();
    let units = space.weight_units().map(|u| space.support().iter().map(|&i| u[i]).collect());
    Measure1D::build(pairs, units)
}

/// A witness for membership in `M_X(ᾱ)`: row `i` holds `α_i μ_i`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubProbDecomposition {
    pub supports: Vec<Vec<usize>>,
    pub mass: Vec<Vec<f64>>,
}

impl SubProbDecomposition {
    /// Checks row sums, column capacities and support containment.
    pub fn validate(&self, space: &FiniteMMSpace, alpha: &AlphaVector) -> Result<()> {
        let n = alpha.len();
        if self.supports.len() != n || self.mass.len() != n {
            return Err(Error::InvalidDecomposition(format!(
                "expected {n} rows, found {} supports and {} mass rows",
                self.supports.len(),
                self.mass.len()
            )));
        }
        let mut col = vec![0.0; space.len()];
        for (i, row) in self.mass.iter().enumerate() {
            if row.len() != space.len() {
                return Err(Error::InvalidDecomposition(format!("row {i} has wrong length")));
            }
            let mut s = 0.0;
            for (x, &m) in row.iter().enumerate() {
                if m < -METRIC_TOL {
                    return Err(Error::InvalidDecomposition(format!("negative mass at ({i},{x})")));
                }
                if m > 0.0 && !self.supports[i].contains(&x) {
                    return Err(Error::InvalidDecomposition(format!("mass outside support at ({i},{x})")));
                }
                s += m;
                col[x] += m;
            }
            if (s - alpha.values()[i]).abs() > METRIC_TOL {
                return Err(Error::InvalidDecomposition(format!("row {i} sums to {s}")));
            }
        }
        for (x, &c) in col.iter().enumerate() {
            if c > space.weight(x) + METRIC_TOL {
                return Err(Error::InvalidDecomposition(format!("column {x} overflows its weight")));
            }
        }
        Ok(())
    }

    /// Points carrying positive mass in row `i`.
    pub fn row_support(&self, i: usize) -> Vec<usize> {
        (0..self.mass[i].len()).filter(|&x| self.mass[i][x] > 0.0).collect()
    }

    /// `max_i diam supp μ_i`.
    pub fn max_support_diameter(&self, space: &FiniteMMSpace) -> f64 {
        (0..self.mass.len()).map(|i| space.set_diameter(&self.row_support(i))).fold(0.0, f64::max)
    }
}
