//! Dense two-phase simplex with Bland's rule, and the maximin reduction.
//!
//! Problems here have at most a few dozen rows, so a dense tableau is the
//! simplest thing that works. Ties are always broken by lowest index.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-10;
const FEAS_EPS: f64 = 1e-9;

/// `coeffs · x <= bound`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

/// The affine functional `coeffs · x + constant`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Piece {
    pub coeffs: Vec<f64>,
    pub constant: f64,
}

impl Piece {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }
}

/// Maximize the minimum of `pieces` over `{x : constraints}`.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearProgram {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
    pub pieces: Vec<Piece>,
    /// Variables marked here are restricted to `x >= 0`; the rest are free.
    pub nonneg: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LpSolution {
    pub value: f64,
    pub point: Vec<f64>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, nonneg: vec![false; num_vars], ..Default::default() }
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, bound: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, bound });
        self
    }

    pub fn piece(&mut self, coeffs: Vec<f64>, constant: f64) -> &mut Self {
        self.pieces.push(Piece { coeffs, constant });
        self
    }

    fn is_nonneg(&self, k: usize) -> bool {
        self.nonneg.get(k).copied().unwrap_or(false)
    }

    /// Largest constraint violation at `x` (zero when feasible).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
            worst = worst.max(lhs - c.bound);
        }
        for (k, &v) in x.iter().enumerate() {
            if self.is_nonneg(k) {
                worst = worst.max(-v);
            }
        }
        worst
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.pieces.iter().map(|p| p.eval(x)).fold(f64::INFINITY, f64::min)
    }
}

/// Dense tableau: `rows` constraint rows then the objective row, each with
/// `cols` entries followed by the right-hand side.
struct Tableau {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * (self.cols + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.a[r * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let p = self.a[pr * w + pc];
        for c in 0..w {
            self.a[pr * w + c] /= p;
        }
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.a[r * w + pc];
            if f != 0.0 {
                for c in 0..w {
                    let v = self.a[pr * w + c];
                    if v != 0.0 {
                        self.a[r * w + c] -= f * v;
                    }
                }
            }
        }
        self.basis[pr] = pc;
    }

    /// Runs Bland's rule on the objective row over columns `< limit`.
    /// Returns false when unbounded.
    fn optimize(&mut self, limit: usize) -> bool {
        let obj = self.rows;
        loop {
            let Some(pc) = (0..limit).find(|&c| self.at(obj, c) < -PIVOT_EPS) else {
                return true;
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for r in 0..self.rows {
                let v = self.at(r, pc);
                if v > PIVOT_EPS {
                    let ratio = self.rhs(r) / v;
                    let better = match best {
                        None => true,
                        Some((br, _, bb)) => {
                            ratio < br - 1e-12 || (ratio <= br + 1e-12 && self.basis[r] < bb)
                        }
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            match best {
                None => return false,
                Some((_, pr, _)) => self.pivot(pr, pc),
            }
        }
    }
}

/// Maximizes `c · y` subject to `a y <= b`, `y >= 0`.
fn maximize_standard(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<(f64, Vec<f64>)> {
    let m = a.len();
    let n = c.len();
    let negative: Vec<usize> = (0..m).filter(|&r| b[r] < 0.0).collect();
    let art = negative.len();
    let cols = n + m + art;
    let w = cols + 1;
    let mut t = Tableau { rows: m, cols, a: vec![0.0; (m + 1) * w], basis: vec![0; m] };
    let mut next_art = n + m;
    for r in 0..m {
        let sign = if b[r] < 0.0 { -1.0 } else { 1.0 };
        for k in 0..n {
            t.a[r * w + k] = sign * a[r][k];
        }
        t.a[r * w + n + r] = sign;
        t.a[r * w + cols] = sign * b[r];
        if b[r] < 0.0 {
            t.a[r * w + next_art] = 1.0;
            t.basis[r] = next_art;
            next_art += 1;
        } else {
            t.basis[r] = n + r;
        }
    }
    if art > 0 {
        // phase one: maximize -sum(artificials)
        let obj = m * w;
        for c in (n + m)..cols {
            t.a[obj + c] = 1.0;
        }
        for &r in &negative {
            for c in 0..w {
                t.a[obj + c] -= t.a[r * w + c];
            }
        }
        t.optimize(cols);
        if t.rhs(m) < -FEAS_EPS {
            return Err(Error::Infeasible);
        }
        // drive remaining artificials out of the basis
        for r in 0..m {
            if t.basis[r] >= n + m {
                if let Some(pc) = (0..n + m).find(|&c| t.at(r, c).abs() > PIVOT_EPS) {
                    t.pivot(r, pc);
                }
            }
        }
    }
    let obj = m * w;
    for c in 0..w {
        t.a[obj + c] = 0.0;
    }
    for k in 0..n {
        t.a[obj + k] = -c[k];
    }
    for r in 0..m {
        let bc = t.basis[r];
        if bc < n && c[bc] != 0.0 {
            let f = c[bc];
            for col in 0..w {
                t.a[obj + col] += f * t.a[r * w + col];
            }
        }
    }
    if !t.optimize(n + m) {
        return Err(Error::UnboundedObjective);
    }
    let mut y = vec![0.0; n];
    for r in 0..m {
        if t.basis[r] < n {
            y[t.basis[r]] = t.rhs(r);
        }
    }
    Ok((t.rhs(m), y))
}

/// Maximizes the minimum of the pieces of `lp`.
///
/// Reduced to one auxiliary variable `t` with `t <= piece` for every piece.
pub fn lp_maximin(lp: &LinearProgram) -> Result<LpSolution> {
    if lp.pieces.is_empty() {
        return Err(Error::UnboundedObjective);
    }
    let nv = lp.num_vars;
    // column layout: each original variable (one or two columns), then t+ and t-
    let mut col_of = Vec::with_capacity(nv);
    let mut ncols = 0;
    for k in 0..nv {
        col_of.push(ncols);
        ncols += if lp.is_nonneg(k) { 1 } else { 2 };
    }
    let tp = ncols;
    ncols += 2;
    let expand = |coeffs: &[f64], row: &mut [f64]| {
        for k in 0..nv {
            let v = coeffs.get(k).copied().unwrap_or(0.0);
            row[col_of[k]] += v;
            if !lp.is_nonneg(k) {
                row[col_of[k] + 1] -= v;
            }
        }
    };
    let mut a = Vec::with_capacity(lp.constraints.len() + lp.pieces.len());
    let mut b = Vec::with_capacity(a.capacity());
    for c in &lp.constraints {
        let mut row = vec![0.0; ncols];
        expand(&c.coeffs, &mut row);
        a.push(row);
        b.push(c.bound);
    }
    for p in &lp.pieces {
        // t - coeffs·x <= constant
        let mut row = vec![0.0; ncols];
        expand(&p.coeffs, &mut row);
        for v in row.iter_mut() {
            *v = -*v;
        }
        row[tp] += 1.0;
        row[tp + 1] -= 1.0;
        a.push(row);
        b.push(p.constant);
    }
    let mut c = vec![0.0; ncols];
    c[tp] = 1.0;
    c[tp + 1] = -1.0;
    let (_, y) = maximize_standard(&c, &a, &b)?;
    let point: Vec<f64> = (0..nv)
        .map(|k| if lp.is_nonneg(k) { y[col_of[k]] } else { y[col_of[k]] - y[col_of[k] + 1] })
        .collect();
    let value = lp.objective(&point);
    Ok(LpSolution { value, point })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_piece_box() {
        let mut lp = LinearProgram::new(1);
        lp.constrain(vec![1.0], 1.0).constrain(vec![-1.0], 0.0).piece(vec![1.0], 0.0);
        let s = lp_maximin(&lp).unwrap();
        assert!((s.value - 1.0).abs() < 1e-9);
        assert!((s.point[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn symmetric_pieces() {
        let mut lp = LinearProgram::new(1);
        lp.constrain(vec![1.0], 1.0).constrain(vec![-1.0], 0.0);
        lp.piece(vec![1.0], 0.0).piece(vec![-1.0], 1.0);
        let s = lp_maximin(&lp).unwrap();
        assert!((s.value - 0.5).abs() < 1e-9);
        assert!((s.point[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn difference_in_box() {
        let mut lp = LinearProgram::new(2);
        lp.constrain(vec![-1.0, 1.0], 1.0).constrain(vec![1.0, -1.0], 1.0);
        for k in 0..2 {
            let mut e = vec![0.0; 2];
            e[k] = 1.0;
            lp.constrain(e.clone(), 3.0);
            e[k] = -1.0;
            lp.constrain(e, 3.0);
        }
        lp.piece(vec![-1.0, 1.0], 0.0);
        let s = lp_maximin(&lp).unwrap();
        // grid search over the box
        let mut best = f64::NEG_INFINITY;
        for i in 0..=600 {
            for j in 0..=600 {
                let (x1, x2) = (-3.0 + i as f64 * 0.01, -3.0 + j as f64 * 0.01);
                if (x2 - x1).abs() <= 1.0 + 1e-12 {
                    best = best.max(x2 - x1);
                }
            }
        }
        assert!((s.value - best).abs() < 1e-6);
        assert!((s.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.constrain(vec![1.0], -1.0).constrain(vec![-1.0], -1.0).piece(vec![1.0], 0.0);
        assert!(matches!(lp_maximin(&lp), Err(Error::Infeasible)));
        let mut lp = LinearProgram::new(1);
        lp.constrain(vec![-1.0], 0.0).piece(vec![1.0], 0.0);
        assert!(matches!(lp_maximin(&lp), Err(Error::UnboundedObjective)));
    }

    #[test]
    fn nonneg_variables_and_negative_bounds() {
        // x >= 0.25 via -x <= -0.25, maximize min(x, 1 - x)
        let mut lp = LinearProgram::new(1);
        lp.nonneg[0] = true;
        lp.constrain(vec![-1.0], -0.75).constrain(vec![1.0], 2.0);
        lp.piece(vec![1.0], 0.0).piece(vec![-1.0], 1.0);
        let s = lp_maximin(&lp).unwrap();
        assert!((s.point[0] - 0.75).abs() < 1e-9);
        assert!((s.value - 0.25).abs() < 1e-9);
    }

    fn grid_oracle(lp: &LinearProgram) -> f64 {
        let steps = 2000;
        let h = 2.0 / steps as f64;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=steps {
            for j in 0..=steps {
                let x = [-1.0 + i as f64 * h, -1.0 + j as f64 * h];
                if lp.violation(&x) <= 1e-12 {
                    best = best.max(lp.objective(&x));
                }
            }
        }
        best
    }

    /// Best `t` over the vertices of `{(x, t) : constraints, t <= pieces}`.
    fn vertex_oracle(lp: &LinearProgram, dims: usize) -> f64 {
        let mut rows: Vec<(Vec<f64>, f64)> = lp
            .constraints
            .iter()
            .map(|c| {
                let mut r = c.coeffs.clone();
                r.push(0.0);
                (r, c.bound)
            })
            .collect();
        for p in &lp.pieces {
            let mut r: Vec<f64> = p.coeffs.iter().map(|v| -v).collect();
            r.push(1.0);
            rows.push((r, p.constant));
        }
        let k = dims + 1;
        let mut best = f64::NEG_INFINITY;
        let m = rows.len();
        let mut pick = (0..k).collect::<Vec<usize>>();
        loop {
            let mut a: Vec<Vec<f64>> = pick.iter().map(|&r| {
                let mut row = rows[r].0.clone();
                row.push(rows[r].1);
                row
            }).collect();
            let mut ok = true;
            for col in 0..k {
                let piv = (col..k).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
                if a[piv][col].abs() < 1e-9 {
                    ok = false;
                    break;
                }
                a.swap(col, piv);
                for r in 0..k {
                    if r != col {
                        let f = a[r][col] / a[col][col];
                        for c in col..=k {
                            a[r][c] -= f * a[col][c];
                        }
                    }
                }
            }
            if ok {
                let z: Vec<f64> = (0..k).map(|i| a[i][k] / a[i][i]).collect();
                let feasible = rows.iter().all(|(r, b)| {
                    r.iter().zip(&z).map(|(p, q)| p * q).sum::<f64>() <= b + 1e-9
                });
                if feasible {
                    best = best.max(z[dims]);
                }
            }
            // next combination
            let mut i = k;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if pick[i] < m - k + i {
                    pick[i] += 1;
                    for j in i + 1..k {
                        pick[j] = pick[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    fn random_lp() -> impl Strategy<Value = (LinearProgram, usize)> {
        (2usize..=3).prop_flat_map(|dims| {
            (
                proptest::collection::vec((proptest::collection::vec(-1.0f64..1.0, dims), 0.0f64..1.0), 0..4),
                proptest::collection::vec((proptest::collection::vec(-1.0f64..1.0, dims), -0.5f64..0.5), 1..4),
            )
                .prop_map(move |(cons, pieces)| {
                    let mut lp = LinearProgram::new(dims);
                    for k in 0..dims {
                        let mut e = vec![0.0; dims];
                        e[k] = 1.0;
                        lp.constrain(e.clone(), 1.0);
                        e[k] = -1.0;
                        lp.constrain(e, 1.0);
                    }
                    for (c, b) in cons {
                        lp.constrain(c, b);
                    }
                    for (c, k) in pieces {
                        lp.piece(c, k);
                    }
                    (lp, dims)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn agrees_with_vertex_enumeration((lp, dims) in random_lp()) {
            let s = lp_maximin(&lp).unwrap();
            prop_assert!(lp.violation(&s.point) <= 1e-7);
            let oracle = vertex_oracle(&lp, dims);
            prop_assert!((s.value - oracle).abs() <= 1e-7, "lp {} vertices {}", s.value, oracle);
            if dims == 2 {
                let grid = grid_oracle(&lp);
                prop_assert!(s.value >= grid - 1e-9);
                prop_assert!(s.value <= grid + 5e-3, "lp {} grid {}", s.value, grid);
            }
        }
    }
}
