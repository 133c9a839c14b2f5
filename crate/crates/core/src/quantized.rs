//! The Gaussian location model quantized into `k` equiprobable cells, and
//! the Fisher information of a finite channel applied to it.
//!
//! Cell `j` (1-based) of the quantizer centred at `c` is
//! `(x_{j−1}, x_j] + c` with `x_j = Φ⁻¹(j/k)`; the last cell is open to
//! `+∞`. Only the increments `y_j = φ(x_{j−1}) − φ(x_j)` enter the
//! information, so nothing here depends on the true mean.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mechanisms::{MechanismMatrix, PrivacyParams};
use crate::numerics::{std_normal_cdf, std_normal_pdf, std_normal_quantile, Probability};

/// Largest quantization level accepted by [`QuantizedModel::new`].
pub const MAX_LEVEL: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedModel {
    k: usize,
    breakpoints: Vec<f64>,
    y: Vec<f64>,
}

impl QuantizedModel {
    /// Equiprobable quantizer with an even number of cells.
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 || !k.is_multiple_of(2) {
            return Err(Error::Domain(format!("quantization level must be even and >= 2, got {k}")));
        }
        Self::with_levels(k)
    }

    /// Any `k ≥ 2`; odd levels are only used to reproduce printed examples.
    pub(crate) fn with_levels(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain(format!("quantization level must be >= 2, got {k}")));
        }
        if k > MAX_LEVEL {
            return Err(Error::Resource(format!("quantization level {k} exceeds {MAX_LEVEL}")));
        }
        // Built from the lower half and mirrored so that x_{k−j} = −x_j and
        // y_{k−j+1} = −y_j hold exactly.
        let mut breakpoints = vec![0.0; k + 1];
        breakpoints[0] = f64::NEG_INFINITY;
        breakpoints[k] = f64::INFINITY;
        for j in 1..=(k - 1) / 2 {
            let x = std_normal_quantile(Probability::new(j as f64 / k as f64)?);
            breakpoints[j] = x;
            breakpoints[k - j] = -x;
        }
        let mut y = vec![0.0; k];
        for j in 1..=k / 2 {
            let v = std_normal_pdf(breakpoints[j - 1]) - std_normal_pdf(breakpoints[j]);
            y[j - 1] = v;
            y[k - j] = -v;
        }
        Ok(Self { k, breakpoints, y })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// `x_0, …, x_k` with `x_0 = −∞` and `x_k = +∞`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `y_1, …, y_k` (stored 0-based).
    pub fn y(&self) -> &[f64] {
        &self.y
    }
}

/// Fisher information per observation about the location parameter.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FisherInfo(f64);

impl FisherInfo {
    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Smallest asymptotic variance a regular estimator can attain with
    /// this much information; `+∞` when the information is zero.
    pub fn inverse(self) -> f64 {
        if self.0 == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.0
        }
    }
}

/// The 1-based cell `j` with `x − center ∈ (x_{j−1}, x_j]`.
pub fn quantize(x: f64, center: f64, model: &QuantizedModel) -> usize {
    let d = x - center;
    let interior = &model.breakpoints[1..model.k];
    interior.partition_point(|&b| b < d) + 1
}

/// Cell probabilities `Φ(x_j + c − θ) − Φ(x_{j−1} + c − θ)` of the
/// quantized observation when the true mean is `theta`.
pub fn cell_probabilities(theta: f64, center: f64, model: &QuantizedModel) -> Vec<f64> {
    let shift = center - theta;
    let cdf: Vec<f64> = model.breakpoints.iter().map(|&x| std_normal_cdf(x + shift)).collect();
    cdf.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect()
}

/// `μ(v) = k (vᵀy)² / (vᵀ1)` with `μ(0) = 0`.
pub fn mu(v: &[f64], model: &QuantizedModel) -> f64 {
    debug_assert_eq!(v.len(), model.k);
    let (vy, total) = v.iter().zip(&model.y).fold((0.0, 0.0), |(vy, total), (&vi, &yi)| (vy + vi * yi, total + vi));
    if total == 0.0 {
        0.0
    } else {
        model.k as f64 * vy * vy / total
    }
}

/// Fisher information of the quantized model seen through `q`, i.e. the
/// sum of `μ` over the rows of `q`. Rows summing to zero contribute zero.
///
/// The value does not depend on the true mean, which is why no location
/// argument is taken.
pub fn fisher_info_quantized(q: &MechanismMatrix, model: &QuantizedModel) -> Result<FisherInfo> {
    if q.k_in() != model.k {
        return Err(Error::Shape(format!("channel has {} inputs but the quantizer has {} cells", q.k_in(), model.k)));
    }
    Ok(FisherInfo(q.rows().map(|row| mu(row, model)).sum()))
}

/// Deterministic 2×k channel reporting which half of the quantizer a cell
/// lies in: output 0 for cells `1..=k/2`, output 1 for the rest.
pub fn half_split(k: usize) -> Result<MechanismMatrix> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::Domain(format!("half split needs an even level, got {k}")));
    }
    let mut entries = vec![0.0; 2 * k];
    for j in 0..k {
        let row = usize::from(j >= k / 2);
        entries[row * k + j] = 1.0;
    }
    MechanismMatrix::new(2, k, entries)
}

/// Information of the sign mechanism: `(2/π) t_ε²`.
pub fn sign_fisher_info(params: &PrivacyParams) -> FisherInfo {
    let t = params.t_eps();
    FisherInfo(2.0 / PI * t * t)
}

/// Information about the mean of `N(θ, σ²)` carried by the sign mechanism
/// applied to standardized data: `sign_fisher_info / σ²`.
pub fn scaled_fisher_info(params: &PrivacyParams, sigma: f64) -> Result<FisherInfo> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!("sigma must be positive and finite, got {sigma}")));
    }
    Ok(FisherInfo(sign_fisher_info(params).value() / (sigma * sigma)))
}
