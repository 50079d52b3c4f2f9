//! Heavy-atom witnesses and the equivalence checks built on them.
//!
//! Vanishing of the (multivariable) partial and observable diameters is tied
//! to the existence of atoms carrying the parameters. The `verify_*` routines
//! evaluate every side of such an equivalence with the exact solvers and
//! report whether they agree.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diameters::{diam_doubleprime_with, multi_partial_diameter_with, partial_diameter_with, underline_diam_with};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::mass::{decimal_units, quantize, with_masses, Mass};
use crate::obsdiam::{obsdiam_doubleprime_with, obsdiam_exact_with, underline_obsdiam_with};
use crate::order::build_dominating_atoms;
use crate::space::{pushforward_values, AlphaVector, FiniteMMSpace, MERGE_TOL};

/// Float-mode threshold under which a solver value counts as zero.
pub const ZERO_TOL: f64 = 1e-9;
/// Relative separation required between projected points.
pub const SEPARATION: f64 = 1e-9;
/// Random directions tried before the deterministic fallback.
pub const DIRECTION_TRIES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum AtomSearch {
    /// `assignment[i]` is the point carrying index `i`.
    Found(Vec<usize>),
    /// No assignment exists; `explored` search nodes were visited.
    Refuted { explored: u64 },
}

impl AtomSearch {
    pub fn assignment(&self) -> Option<&[usize]> {
        match self {
            AtomSearch::Found(a) => Some(a),
            AtomSearch::Refuted { .. } => None,
        }
    }
}

/// Support points and masses sorted heaviest first, with the quotas in the
/// same arithmetic.
fn sorted_atoms(space: &FiniteMMSpace) -> (Vec<usize>, Vec<f64>, Option<Vec<i64>>) {
    let a = crate::space::atoms(space);
    let pts: Vec<usize> = a.iter().map(|p| p.0).collect();
    let w = a.iter().map(|p| p.1).collect();
    let wu = space.weight_units().map(|u| pts.iter().map(|&p| u[p]).collect());
    (pts, w, wu)
}

fn indices_by_quota(abar: &AlphaVector) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..abar.len()).collect();
    idx.sort_by(|&a, &b| abar.values()[b].total_cmp(&abar.values()[a]).then(a.cmp(&b)));
    idx
}

/// Points `x_i`, not necessarily distinct, with `Σ_{i ↦ x} α_i <= μ({x})`
/// for every point `x`.
pub fn atom_assignment(space: &FiniteMMSpace, abar: &AlphaVector) -> Result<AtomSearch> {
    atom_assignment_with(space, abar, &Limits::default())
}

pub fn atom_assignment_with(space: &FiniteMMSpace, abar: &AlphaVector, limits: &Limits) -> Result<AtomSearch> {
    Limits::check("atom_assignment", abar.len(), limits.assignment)?;
    let (pts, w, wu) = sorted_atoms(space);
    let order = indices_by_quota(abar);
    let q = quantize(&w, wu.as_deref(), abar.values(), abar.units());
    let (found, explored) = with_masses!(q, |w, q| {
        let quotas: Vec<_> = order.iter().map(|&i| q[i]).collect();
        let mut rem = w.clone();
        let mut choice = vec![0usize; quotas.len()];
        let mut explored = 0u64;
        let ok = bins(&quotas, &mut rem, &mut choice, 0, &mut explored);
        (ok.then_some(choice), explored)
    });
    Ok(match found {
        Some(choice) => {
            let mut assignment = vec![0usize; abar.len()];
            for (k, &i) in order.iter().enumerate() {
                assignment[i] = pts[choice[k]];
            }
            AtomSearch::Found(assignment)
        }
        None => AtomSearch::Refuted { explored },
    })
}

fn bins<M: Mass>(quotas: &[M], rem: &mut [M], choice: &mut [usize], k: usize, explored: &mut u64) -> bool {
    *explored += 1;
    if k == quotas.len() {
        return true;
    }
    let mut tried: Vec<M> = Vec::new();
    for c in 0..rem.len() {
        if !M::covers(rem[c], quotas[k]) || tried.contains(&rem[c]) {
            continue;
        }
        tried.push(rem[c]);
        choice[k] = c;
        rem[c] -= quotas[k];
        let ok = bins(quotas, rem, choice, k + 1, explored);
        rem[c] += quotas[k];
        if ok {
            return true;
        }
    }
    false
}

/// Distinct points with `μ({x_i}) >= α_i`: the `k`-th largest quota against
/// the `k`-th heaviest atom.
pub fn distinct_atom_matching(space: &FiniteMMSpace, abar: &AlphaVector) -> Result<AtomSearch> {
    distinct_atom_matching_with(space, abar, &Limits::default())
}

pub fn distinct_atom_matching_with(space: &FiniteMMSpace, abar: &AlphaVector, limits: &Limits) -> Result<AtomSearch> {
    Limits::check("distinct_atom_matching", abar.len(), limits.assignment)?;
    let (pts, w, wu) = sorted_atoms(space);
    let order = indices_by_quota(abar);
    if order.len() > pts.len() {
        return Ok(AtomSearch::Refuted { explored: 0 });
    }
    let q = quantize(&w, wu.as_deref(), abar.values(), abar.units());
    let fits = with_masses!(q, |w, q| order.iter().enumerate().all(|(k, &i)| Mass::covers(w[k], q[i])));
    if !fits {
        return Ok(AtomSearch::Refuted { explored: order.len() as u64 });
    }
    let mut assignment = vec![0usize; abar.len()];
    for (k, &i) in order.iter().enumerate() {
        assignment[i] = pts[k];
    }
    Ok(AtomSearch::Found(assignment))
}

/// A direction `p` with `‖p‖₁ = 1` on which `x -> ⟨p, x⟩` separates the
/// given points.
pub fn generic_direction(points: &[Vec<f64>], seed: u64) -> Result<Vec<f64>> {
    let Some(first) = points.first() else {
        return Err(Error::DegenerateInput("no points".into()));
    };
    let m = first.len();
    if m == 0 {
        return Err(Error::DegenerateInput("points have no coordinates".into()));
    }
    if let Some(p) = points.iter().find(|p| p.len() != m) {
        return Err(Error::DimensionMismatch { expected: m, found: p.len() });
    }
    for a in 0..points.len() {
        if points[a + 1..].contains(&points[a]) {
            return Err(Error::DegenerateInput(format!("point {a} is repeated")));
        }
    }
    let mut e1 = vec![0.0; m];
    e1[0] = 1.0;
    if points.len() == 1 {
        return Ok(e1);
    }
    let scale = points.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    let separates = |p: &[f64]| {
        let mut v: Vec<f64> = points.iter().map(|x| dot(p, x)).collect();
        v.sort_by(f64::total_cmp);
        v.windows(2).all(|w| w[1] - w[0] >= SEPARATION * scale)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..DIRECTION_TRIES {
        // exponential magnitudes with random signs, normalized: uniform on the sphere
        let mut p: Vec<f64> = (0..m)
            .map(|_| {
                let u: f64 = 1.0 - rng.random::<f64>();
                let e = -libm::log(u);
                if rng.random::<bool>() { e } else { -e }
            })
            .collect();
        let n: f64 = p.iter().map(|v| v.abs()).sum();
        if n == 0.0 {
            continue;
        }
        p.iter_mut().for_each(|v| *v /= n);
        if separates(&p) {
            return Ok(p);
        }
    }
    let mut p: Vec<f64> = (0..m).map(|k| libm::pow(core::f64::consts::E, -(k as f64))).collect();
    let n: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= n);
    if separates(&p) {
        Ok(p)
    } else {
        Err(Error::DegenerateInput("no separating direction found".into()))
    }
}

fn dot(p: &[f64], x: &[f64]) -> f64 {
    p.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Values `⟨p, x⟩` of the embedded points, after checking `‖p‖₁ <= 1`.
fn projection(space: &FiniteMMSpace, p: &[f64]) -> Result<Vec<f64>> {
    let norm: f64 = p.iter().map(|v| v.abs()).sum();
    if norm > 1.0 + 1e-12 {
        return Err(Error::NotUnitL1(norm));
    }
    let coords = space.coords().ok_or_else(|| Error::DegenerateInput("space has no coordinates".into()))?;
    if let Some(c) = coords.iter().find(|c| c.len() != p.len()) {
        return Err(Error::DimensionMismatch { expected: p.len(), found: c.len() });
    }
    Ok(coords.iter().map(|c| dot(p, c)).collect())
}

/// Whether every positive-mass fiber of `x -> ⟨p, x⟩` is a single atom.
pub fn verify_ap(space: &FiniteMMSpace, p: &[f64]) -> Result<bool> {
    let f = projection(space, p)?;
    let mut v: Vec<f64> = space.support().iter().map(|&i| f[i]).collect();
    v.sort_by(f64::total_cmp);
    Ok(v.windows(2).all(|w| w[1] - w[0] > MERGE_TOL))
}

/// Whether a nonempty family set on the space survives the projection to
/// the line. Requires `p` to separate the atoms.
pub fn d_feasibility_preserved(space: &FiniteMMSpace, abar: &AlphaVector, p: &[f64]) -> Result<bool> {
    if !verify_ap(space, p)? {
        return Err(Error::DegenerateInput("direction merges atoms".into()));
    }
    let limits = Limits::default();
    if !multi_partial_diameter_with(space, abar, &limits)?.is_finite() {
        return Ok(true);
    }
    let line = pushforward_values(space, &projection(space, p)?)?.to_space();
    Ok(multi_partial_diameter_with(&line, abar, &limits)?.is_finite())
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Condition {
    pub label: String,
    pub holds: bool,
    /// The solver value behind the condition, when there is one.
    pub value: Option<f64>,
    pub witness: Option<String>,
}

impl Condition {
    fn new(label: &str, holds: bool, value: Option<f64>, witness: Option<String>) -> Self {
        Condition { label: label.into(), holds, value, witness }
    }
}

/// Enough to rerun a failed check.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Counterexample {
    pub space: FiniteMMSpace,
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TheoremReport {
    pub theorem: String,
    pub conditions: Vec<Condition>,
    pub consistent: bool,
    /// Present exactly when `consistent` is false.
    pub counterexample: Option<Counterexample>,
}

impl TheoremReport {
    fn new(theorem: &str, conditions: Vec<Condition>, consistent: bool, space: &FiniteMMSpace, alphas: &[f64]) -> Self {
        let counterexample = (!consistent).then(|| Counterexample { space: space.clone(), alphas: alphas.to_vec() });
        TheoremReport { theorem: theorem.into(), conditions, consistent, counterexample }
    }

    pub fn condition(&self, label: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.label == label)
    }
}

/// Zero exactly when all masses are exact decimals, else up to [`ZERO_TOL`].
fn is_zero(v: f64, exact: bool) -> bool {
    if exact {
        v == 0.0
    } else {
        v <= ZERO_TOL
    }
}

fn exact_inputs(space: &FiniteMMSpace, alphas: &[f64]) -> bool {
    space.weight_units().is_some() && alphas.iter().all(|&a| decimal_units(a).is_some())
}

/// Heavy atom, vanishing partial diameter and vanishing observable diameter
/// at a single parameter.
pub fn verify_main_theorem1(space: &FiniteMMSpace, alpha: f64) -> Result<TheoremReport> {
    verify_main_theorem1_with(space, alpha, &Limits::default())
}

pub fn verify_main_theorem1_with(space: &FiniteMMSpace, alpha: f64, limits: &Limits) -> Result<TheoremReport> {
    let exact = exact_inputs(space, &[alpha]);
    let pd = partial_diameter_with(space, alpha, limits)?;
    let obs = obsdiam_exact_with(space, alpha, limits)?;
    let (heavy, mass) = crate::space::atoms(space)[0];
    let q = quantize(&[mass], space.weight_units().map(|u| vec![u[heavy]]).as_deref(), &[alpha], None);
    let has_atom = with_masses!(q, |w, q| Mass::covers(w[0], q[0]));
    let conditions = vec![
        Condition::new("heavy atom", has_atom, Some(mass), has_atom.then(|| space.labels()[heavy].clone())),
        Condition::new("partial diameter zero", is_zero(pd, exact), Some(pd), None),
        Condition::new("observable diameter zero", is_zero(obs.value, exact), Some(obs.value), None),
    ];
    let consistent = conditions.iter().all(|c| c.holds == has_atom);
    Ok(TheoremReport::new("single parameter", conditions, consistent, space, &[alpha]))
}

/// Atom assignment, vanishing `u-diam` and `u-Obsdiam`, and the dominating
/// space built from the assignment.
pub fn verify_main_theorem2(space: &FiniteMMSpace, abar: &AlphaVector) -> Result<TheoremReport> {
    verify_main_theorem2_with(space, abar, &Limits::default())
}

pub fn verify_main_theorem2_with(space: &FiniteMMSpace, abar: &AlphaVector, limits: &Limits) -> Result<TheoremReport> {
    let exact = exact_inputs(space, abar.values());
    let assign = atom_assignment_with(space, abar, limits)?;
    let ud = underline_diam_with(space, abar, limits)?.value.to_f64();
    let uo = underline_obsdiam_with(space, abar, limits)?;
    let c2 = assign.assignment().is_some();
    let built = match assign.assignment() {
        Some(a) => {
            let l = build_dominating_atoms(space, a, abar)?;
            let (sub, _) = l.space.restrict_to_support();
            let zero = match multi_partial_diameter_with(&sub, abar, limits) {
                Ok(v) => is_zero(v.to_f64(), exact),
                Err(Error::SizeLimitExceeded { .. }) => true,
                Err(e) => return Err(e),
            };
            Some(l.witness.checked && l.family_ok && zero)
        }
        None => None,
    };
    let c1 = built.unwrap_or(false);
    let conditions = vec![
        Condition::new(
            "dominating space with distinct atoms",
            c1,
            None,
            built.map(|ok| String::from(if ok { "layered space verified" } else { "layered space failed verification" })),
        ),
        Condition::new("atom assignment", c2, None, assign.assignment().map(|a| format!("{a:?}"))),
        Condition::new("u-diam zero", is_zero(ud, exact), Some(ud), None),
        Condition::new("u-obsdiam zero", is_zero(uo.value, exact), Some(uo.value), None),
    ];
    let consistent = conditions[1..].iter().all(|c| c.holds == c2) && (!c2 || c1);
    Ok(TheoremReport::new("multiple parameters", conditions, consistent, space, abar.values()))
}

/// The characterization of `diam″ = 0` and the one-way statement for
/// `Obsdiam″ = 0`.
pub fn verify_section6(space: &FiniteMMSpace, abar: &AlphaVector) -> Result<TheoremReport> {
    verify_section6_with(space, abar, &Limits::default())
}

pub fn verify_section6_with(space: &FiniteMMSpace, abar: &AlphaVector, limits: &Limits) -> Result<TheoremReport> {
    let exact = exact_inputs(space, abar.values());
    let dpp = diam_doubleprime_with(space, abar, limits)?;
    let opp = obsdiam_doubleprime_with(space, abar, limits)?;
    let matching = distinct_atom_matching_with(space, abar, limits)?;
    let family = multi_partial_diameter_with(space, abar, limits)?;
    let m = matching.assignment().is_some();
    let empty = !family.is_finite();
    let small = space.support().len() <= abar.len();
    let dz = is_zero(dpp, exact);
    let oz = is_zero(opp.value, exact);
    let conditions = vec![
        Condition::new("diam'' zero", dz, Some(dpp), None),
        Condition::new("obsdiam'' zero", oz, Some(opp.value), None),
        Condition::new("distinct atoms", m, None, matching.assignment().map(|a| format!("{a:?}"))),
        Condition::new("family set empty", empty, None, None),
        Condition::new("support at most n", small, Some(space.support().len() as f64), None),
    ];
    let consistent = dz == (m || (empty && small)) && (!(oz && !empty) || m);
    Ok(TheoremReport::new("doubleprime", conditions, consistent, space, abar.values()))
}
