//! Dense two-phase primal simplex for `max cᵀx s.t. Ax = b, x ≥ 0`.
//!
//! Bland's rule throughout, so degenerate programs (the staircase LP is
//! heavily degenerate) cannot cycle. Sized for a dozen rows and a few
//! thousand columns.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Column indices of the final basis (original variables only).
    pub basis: Vec<usize>,
    pub pivots: usize,
}

struct Tableau {
    rows: usize,
    width: usize,
    /// `rows + 1` rows of `width` entries; the last row is the objective,
    /// the last column the right-hand side.
    cells: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.cells[r * self.width + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.at(row, col);
        for c in 0..w {
            self.cells[row * w + c] /= p;
        }
        for r in 0..=self.rows {
            if r == row {
                continue;
            }
            let f = self.at(r, col);
            if f == 0.0 {
                continue;
            }
            for c in 0..w {
                let v = self.cells[row * w + c];
                if v != 0.0 {
                    self.cells[r * w + c] -= f * v;
                }
            }
            self.cells[r * w + col] = 0.0;
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Runs Bland's rule on columns `0..allowed` until optimal.
    fn optimize(&mut self, allowed: usize) -> Result<()> {
        let obj = self.rows;
        loop {
            let entering = (0..allowed).find(|&c| self.at(obj, c) < -COST_TOL);
            let Some(col) = entering else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, col);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - 1e-14 || (ratio <= bratio + 1e-14 && self.basis[r] < self.basis[br]) {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::Solver("linear program is unbounded".into()));
            };
            self.pivot(row, col);
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Solver("pivot limit reached".into()));
            }
        }
    }
}

/// Maximizes `objective · x` subject to `constraints · x = rhs`, `x ≥ 0`.
///
/// `constraints` is row-major with `rhs.len()` rows of `objective.len()`
/// columns.
pub fn maximize(constraints: &[f64], rhs: &[f64], objective: &[f64]) -> Result<SimplexSolution> {
    let m = rhs.len();
    let n = objective.len();
    if constraints.len() != m * n {
        return Err(Error::Shape(format!("expected {m}x{n} constraint matrix")));
    }
    // Columns: n originals, m artificials, rhs.
    let width = n + m + 1;
    let mut cells = vec![0.0; (m + 1) * width];
    for r in 0..m {
        // Flip rows with negative rhs so the artificial start is feasible.
        let sign = if rhs[r] < 0.0 { -1.0 } else { 1.0 };
        for c in 0..n {
            cells[r * width + c] = sign * constraints[r * n + c];
        }
        cells[r * width + n + r] = 1.0;
        cells[r * width + width - 1] = sign * rhs[r];
    }
    // Phase one: maximize −Σ artificials, written in reduced form.
    for r in 0..m {
        for c in 0..n {
            cells[m * width + c] -= cells[r * width + c];
        }
        cells[m * width + width - 1] -= cells[r * width + width - 1];
    }
    let mut t = Tableau { rows: m, width, cells, basis: (n..n + m).collect(), pivots: 0 };
    t.optimize(n + m)?;
    let residual = -t.rhs(m);
    if residual.abs() > 1e-9 {
        return Err(Error::Solver(format!("linear program is infeasible (phase one residual {residual:e})")));
    }
    // Drive degenerate artificials out of the basis where possible.
    for r in 0..m {
        if t.basis[r] >= n {
            if let Some(c) = (0..n).find(|&c| t.at(r, c).abs() > PIVOT_TOL) {
                t.pivot(r, c);
            }
        }
    }
    // Phase two objective row: −c, reduced against the current basis.
    for c in 0..width {
        t.cells[m * width + c] = 0.0;
    }
    for c in 0..n {
        t.cells[m * width + c] = -objective[c];
    }
    for r in 0..m {
        let b = t.basis[r];
        let f = t.at(m, b);
        if f != 0.0 {
            for c in 0..width {
                let v = t.cells[r * width + c];
                t.cells[m * width + c] -= f * v;
            }
        }
    }
    t.optimize(n)?;

    let mut x = vec![0.0; n];
    let mut basis = Vec::with_capacity(m);
    for r in 0..m {
        let b = t.basis[r];
        if b < n {
            let v = t.rhs(r);
            x[b] = if v.abs() < 1e-13 { 0.0 } else { v };
            basis.push(b);
        }
    }
    let value = x.iter().zip(objective).map(|(a, c)| a * c).sum();
    Ok(SimplexSolution { x, value, basis, pivots: t.pivots })
}
