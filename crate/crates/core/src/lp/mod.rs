//! Computational check that the sign mechanism is optimal on every
//! quantization level.
//!
//! Maximizing the quantized information over ε-LDP channels with `k` inputs
//! is equivalent to the linear program
//!
//! ```text
//! max  μ⃗ᵀα   s.t.  S α = 1⃗,  α ≥ 0
//! ```
//!
//! where the `2^k` columns of the staircase matrix `S` are all vectors with
//! entries in `{1, e^ε}` and `μ⃗` holds `μ` of each column. The dual is
//! `min 1⃗ᵀβ s.t. Sᵀβ ≥ μ⃗`; [`dual_certificate`] is an explicit dual point
//! whose objective equals the sign mechanism's information, so dual
//! feasibility closes the equality chain.

pub mod bounds;
pub mod simplex;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mechanisms::{MechanismMatrix, PrivacyParams};
use crate::quantized::{mu, QuantizedModel};

pub use bounds::{final_inequality_l, interior_stationarity_g, lemma3_l, lemma4_l};

/// Largest level for which the staircase program is built.
pub const MAX_BUILD_LEVEL: usize = 20;
/// Largest level handed to the simplex solver (4096 columns).
pub const MAX_SOLVE_LEVEL: usize = 12;
/// Largest level for the streamed dual feasibility sweep.
pub const MAX_SWEEP_LEVEL: usize = 24;

/// Primal residual tolerance for `S α = 1⃗`.
pub const PRIMAL_TOLERANCE: f64 = 1e-9;
/// Tolerance for comparing objective values along the duality chain.
pub const VALUE_TOLERANCE: f64 = 1e-8;

/// Row `i` of column `j` is `e^ε` iff bit `k−1−i` of `j` is set (binary word
/// of `j`, most significant bit first).
#[inline]
fn bit(word: usize, row: usize, k: usize) -> bool {
    (word >> (k - 1 - row)) & 1 == 1
}

/// The staircase program at level `k`. Columns are generated from their
/// index rather than stored; `μ⃗` is materialized.
#[derive(Debug, Clone)]
pub struct StaircaseLp {
    k: usize,
    params: PrivacyParams,
    model: QuantizedModel,
    mu_vec: Vec<f64>,
}

impl StaircaseLp {
    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn params(&self) -> &PrivacyParams {
        &self.params
    }

    #[inline]
    pub fn columns(&self) -> usize {
        1 << self.k
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        if bit(col, row, self.k) {
            self.params.ratio_bound()
        } else {
            1.0
        }
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.k).map(|i| self.entry(i, col)).collect()
    }

    /// The full `k × 2^k` matrix, row-major.
    pub fn matrix(&self) -> Vec<f64> {
        let n = self.columns();
        let mut out = Vec::with_capacity(self.k * n);
        for i in 0..self.k {
            out.extend((0..n).map(|j| self.entry(i, j)));
        }
        out
    }

    pub fn mu_vec(&self) -> &[f64] {
        &self.mu_vec
    }

    pub fn model(&self) -> &QuantizedModel {
        &self.model
    }

    /// Index of the column that is `1` on the first half of the rows and
    /// `e^ε` on the second half.
    fn lower_half_column(&self) -> usize {
        (1 << (self.k / 2)) - 1
    }

    fn require_even(&self) -> Result<()> {
        if !self.k.is_multiple_of(2) {
            return Err(Error::Domain(format!("optimality checks need an even level, got {}", self.k)));
        }
        Ok(())
    }
}

/// Builds the staircase program. Odd `k` is accepted so the printed
/// three-row example can be reproduced; everything downstream requires an
/// even level.
pub fn build_staircase_lp(k: usize, params: &PrivacyParams) -> Result<StaircaseLp> {
    if k > MAX_BUILD_LEVEL {
        return Err(Error::Resource(format!("staircase level {k} exceeds {MAX_BUILD_LEVEL}")));
    }
    if !params.epsilon().is_finite() {
        return Err(Error::Domain("staircase program needs a finite epsilon".into()));
    }
    let model = QuantizedModel::with_levels(k)?;
    let mut lp = StaircaseLp { k, params: *params, model, mu_vec: Vec::new() };
    let mut column = vec![0.0; k];
    lp.mu_vec = (0..lp.columns())
        .map(|j| {
            for (i, c) in column.iter_mut().enumerate() {
                *c = lp.entry(i, j);
            }
            mu(&column, &lp.model)
        })
        .collect();
    Ok(lp)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimalSolution {
    pub alpha: Vec<f64>,
    pub value: f64,
}

impl PrimalSolution {
    /// Indices with strictly positive weight.
    pub fn support(&self) -> Vec<usize> {
        self.alpha.iter().enumerate().filter(|(_, &a)| a > 0.0).map(|(j, _)| j).collect()
    }

    /// `max_i |(S α)_i − 1|`.
    pub fn residual(&self, lp: &StaircaseLp) -> f64 {
        (0..lp.k)
            .map(|i| {
                let row: f64 = self.support().iter().map(|&j| lp.entry(i, j) * self.alpha[j]).sum();
                (row - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Solves the staircase program by dense simplex and returns an optimal
/// vertex.
pub fn solve_primal(lp: &StaircaseLp) -> Result<PrimalSolution> {
    lp.require_even()?;
    if lp.k > MAX_SOLVE_LEVEL {
        return Err(Error::Resource(format!("simplex is limited to k <= {MAX_SOLVE_LEVEL}, got {}", lp.k)));
    }
    let sol = simplex::maximize(&lp.matrix(), &vec![1.0; lp.k], &lp.mu_vec)?;
    let out = PrimalSolution { alpha: sol.x, value: sol.value };
    let residual = out.residual(lp);
    if residual > PRIMAL_TOLERANCE {
        return Err(Error::Solver(format!("simplex returned an infeasible point (residual {residual:e})")));
    }
    Ok(out)
}

/// The feasible point that reproduces the sign mechanism: weight
/// `1/(1+e^ε)` on the column that is `1` on the lower half of the cells
/// and `e^ε` on the upper half, and on its complement.
pub fn candidate_alpha(lp: &StaircaseLp) -> Result<PrimalSolution> {
    lp.require_even()?;
    let lower = lp.lower_half_column();
    let upper = (lp.columns() - 1) ^ lower;
    let w = 1.0 / (1.0 + lp.params.ratio_bound());
    let mut alpha = vec![0.0; lp.columns()];
    alpha[lower] = w;
    alpha[upper] = w;
    let value = w * (lp.mu_vec[lower] + lp.mu_vec[upper]);
    Ok(PrimalSolution { alpha, value })
}

/// `[S diag(α)]ᵀ` with zero-weight rows dropped. Output rows follow the
/// column order of `S`.
pub fn mechanism_from_alpha(alpha: &PrimalSolution, lp: &StaircaseLp) -> Result<MechanismMatrix> {
    if alpha.alpha.len() != lp.columns() {
        return Err(Error::Shape(format!("expected {} weights, got {}", lp.columns(), alpha.alpha.len())));
    }
    let support = alpha.support();
    let mut entries = Vec::with_capacity(support.len() * lp.k);
    for &j in &support {
        entries.extend((0..lp.k).map(|i| alpha.alpha[j] * lp.entry(i, j)));
    }
    MechanismMatrix::new(support.len(), lp.k, entries)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualCertificate {
    pub beta: Vec<f64>,
}

impl DualCertificate {
    /// Dual objective `1⃗ᵀβ`.
    pub fn value(&self) -> f64 {
        self.beta.iter().sum()
    }
}

/// `β*_j = −2t²/(πk) + |y_j| t² √(8/π)`.
pub fn dual_certificate(k: usize, params: &PrivacyParams) -> Result<DualCertificate> {
    let model = QuantizedModel::new(k)?;
    Ok(certificate_for(&model, params))
}

fn certificate_for(model: &QuantizedModel, params: &PrivacyParams) -> DualCertificate {
    let t2 = params.t_eps() * params.t_eps();
    let k = model.k() as f64;
    let scale = t2 * (8.0 / PI).sqrt();
    let beta = model.y().iter().map(|y| -2.0 * t2 / (PI * k) + y.abs() * scale).collect();
    DualCertificate { beta }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualFeasibilityReport {
    pub feasible: bool,
    /// `min_j (S_·j)ᵀβ* − μ_j`.
    pub worst_slack: f64,
    /// 0-based column index (binary word) attaining the minimum.
    pub worst_column: usize,
}

/// Sweeps all `2^k` dual constraints for [`dual_certificate`], generating
/// columns from their index. Ties in the minimum resolve to the smallest
/// column, so the report does not depend on how the sweep is split.
pub fn check_dual_feasibility(k: usize, params: &PrivacyParams, tol: f64) -> Result<DualFeasibilityReport> {
    if k > MAX_SWEEP_LEVEL {
        return Err(Error::Resource(format!("dual sweep is limited to k <= {MAX_SWEEP_LEVEL}, got {k}")));
    }
    if !params.epsilon().is_finite() {
        return Err(Error::Domain("dual sweep needs a finite epsilon".into()));
    }
    let model = QuantizedModel::new(k)?;
    let beta = certificate_for(&model, params).beta;
    let y = model.y();
    let e = params.ratio_bound();
    let kf = k as f64;
    let slack = |col: usize| -> f64 {
        let (mut sb, mut sy, mut s1) = (0.0, 0.0, 0.0);
        for i in 0..k {
            let s = if bit(col, i, k) { e } else { 1.0 };
            sb += s * beta[i];
            sy += s * y[i];
            s1 += s;
        }
        sb - kf * sy * sy / s1
    };
    let (worst_slack, worst_column) =
        (0..1usize << k).into_par_iter().with_min_len(1 << 12).map(|j| (slack(j), j)).reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| match a.0.total_cmp(&b.0) {
                std::cmp::Ordering::Less => a,
                std::cmp::Ordering::Greater => b,
                std::cmp::Ordering::Equal => {
                    if a.1 <= b.1 {
                        a
                    } else {
                        b
                    }
                }
            },
        );
    Ok(DualFeasibilityReport { feasible: worst_slack >= -tol, worst_slack, worst_column })
}
