//! Staged estimators of a Gaussian mean built on the sign mechanism.
//!
//! Every agent releases exactly one sanitized bit. Agents are assigned to
//! stages in data order: for the two-stage procedure the first `n1` values
//! form stage 1 and the rest stage 2; the three-stage procedure spends the
//! first `n0` values on a bisection search before running two stages on the
//! remainder.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mechanisms::{sign_mechanism, PrivacyParams};
use crate::numerics::{std_normal_cdf, std_normal_pdf, std_normal_quantile, Probability};

/// Exponent of the default stage-1 size `⌊n^0.7⌋`. A heuristic only: any
/// `n1 → ∞` with `n1 = o(n)` gives the optimal limit.
pub const DEFAULT_N1_EXPONENT: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    One,
    Two,
    Three,
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "one" | "one-stage" | "1" => Ok(Self::One),
            "two" | "two-stage" | "2" => Ok(Self::Two),
            "three" | "three-stage" | "3" => Ok(Self::Three),
            other => Err(Error::Config(format!("unknown estimator '{other}' (expected one|two|three)"))),
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::One => "one",
            Self::Two => "two",
            Self::Three => "three",
        })
    }
}

/// Estimator settings. `n` is taken from the data length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub params: PrivacyParams,
    /// Initial guess used as the stage-1 center.
    pub theta0: f64,
    /// Stage-1 size; `None` selects `⌊m^0.7⌋` for the `m` agents available
    /// to the two-stage part.
    pub n1: Option<usize>,
    /// Agents spent on the bisection search (three-stage only).
    pub n0: usize,
    /// Bisection rounds (three-stage only).
    pub bits: u32,
    pub range_lo: f64,
    pub range_hi: f64,
    /// Known standard deviation of the data.
    pub sigma: f64,
}

impl EstimatorConfig {
    pub fn new(params: PrivacyParams) -> Self {
        Self { params, theta0: 0.0, n1: None, n0: 15_000, bits: 7, range_lo: 0.0, range_hi: 128.0, sigma: 1.0 }
    }

    pub fn with_theta0(mut self, theta0: f64) -> Self {
        self.theta0 = theta0;
        self
    }

    pub fn with_n1(mut self, n1: usize) -> Self {
        self.n1 = Some(n1);
        self
    }

    pub fn with_preliminary(mut self, n0: usize, bits: u32, range_lo: f64, range_hi: f64) -> Self {
        self.n0 = n0;
        self.bits = bits;
        self.range_lo = range_lo;
        self.range_hi = range_hi;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    /// Stage-1 size for a two-stage run over `m` agents.
    pub fn resolved_n1(&self, m: usize) -> Result<usize> {
        let n1 = self.n1.unwrap_or_else(|| default_n1(m));
        if n1 == 0 || n1 >= m {
            return Err(Error::Config(format!("need 0 < n1 < n, got n1={n1}, n={m}")));
        }
        Ok(n1)
    }

    fn check_sigma(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Domain(format!("sigma must be positive and finite, got {}", self.sigma)));
        }
        Ok(())
    }

    fn check_preliminary(&self) -> Result<()> {
        if !self.range_lo.is_finite() || !self.range_hi.is_finite() || self.range_lo >= self.range_hi {
            return Err(Error::Config(format!("invalid range [{}, {}]", self.range_lo, self.range_hi)));
        }
        if self.bits == 0 || (self.n0 as u64) < u64::from(self.bits) {
            return Err(Error::Config(format!("need n0 >= bits >= 1, got n0={}, bits={}", self.n0, self.bits)));
        }
        Ok(())
    }
}

/// `⌊n^0.7⌋`, at least 1.
pub fn default_n1(n: usize) -> usize {
    ((n as f64).powf(DEFAULT_N1_EXPONENT).floor() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateResult {
    pub theta_hat: f64,
    pub stage_estimates: Vec<f64>,
    /// Per stage: the mean bit fell outside `(−t_ε, t_ε)` and the stage
    /// returned its center.
    pub clamped: Vec<bool>,
}

impl EstimateResult {
    pub fn any_clamped(&self) -> bool {
        self.clamped.iter().any(|&c| c)
    }

    fn scaled(mut self, sigma: f64) -> Self {
        self.theta_hat *= sigma;
        self.stage_estimates.iter_mut().for_each(|v| *v *= sigma);
        self
    }
}

/// `center − Φ⁻¹(1/2 − z̄/(2t_ε))` when `|z̄| < t_ε`, else `center`.
pub fn invert_mean(z_bar: f64, center: f64, params: &PrivacyParams) -> f64 {
    invert_checked(z_bar, center, params).0
}

fn invert_checked(z_bar: f64, center: f64, params: &PrivacyParams) -> (f64, bool) {
    let t = params.t_eps();
    if z_bar.abs() < t {
        // Strictly inside (0, 1) because |z̄| < t.
        let p = Probability::new(0.5 - z_bar / (2.0 * t)).expect("argument lies in (0, 1)");
        (center - std_normal_quantile(p), false)
    } else {
        (center, true)
    }
}

/// Mean of the released bits of `data` centered at `center`.
fn sanitized_mean<R: Rng + ?Sized>(data: &[f64], center: f64, params: &PrivacyParams, rng: &mut R) -> f64 {
    let sum: i64 = data.iter().map(|&x| i64::from(sign_mechanism(x, center, params, rng).value())).sum();
    sum as f64 / data.len() as f64
}

fn stage<R: Rng + ?Sized>(data: &[f64], center: f64, params: &PrivacyParams, rng: &mut R) -> (f64, bool) {
    invert_checked(sanitized_mean(data, center, params, rng), center, params)
}

/// All agents centered at `θ0`.
pub fn one_stage<R: Rng + ?Sized>(data: &[f64], config: &EstimatorConfig, rng: &mut R) -> Result<EstimateResult> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let (theta_hat, clamped) = stage(data, config.theta0, &config.params, rng);
    Ok(EstimateResult { theta_hat, stage_estimates: vec![theta_hat], clamped: vec![clamped] })
}

/// Stage 1 centered at `θ0`, stage 2 centered at the stage-1 estimate.
pub fn two_stage<R: Rng + ?Sized>(data: &[f64], config: &EstimatorConfig, rng: &mut R) -> Result<EstimateResult> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    two_stage_from(data, config.theta0, config, rng)
}

fn two_stage_from<R: Rng + ?Sized>(
    data: &[f64],
    theta0: f64,
    config: &EstimatorConfig,
    rng: &mut R,
) -> Result<EstimateResult> {
    let n1 = config.resolved_n1(data.len())?;
    let (first, second) = data.split_at(n1);
    let (s1, c1) = stage(first, theta0, &config.params, rng);
    let (s2, c2) = stage(second, s1, &config.params, rng);
    Ok(EstimateResult { theta_hat: s2, stage_estimates: vec![s1, s2], clamped: vec![c1, c2] })
}

/// Bisection over `[range_lo, range_hi]`: `bits` rounds of `⌊n0/bits⌋`
/// fresh agents each, moving to the upper half when the round's mean bit is
/// nonnegative. Returns the final midpoint.
pub fn preliminary_bisection<R: Rng + ?Sized>(data: &[f64], config: &EstimatorConfig, rng: &mut R) -> Result<f64> {
    config.check_preliminary()?;
    if data.len() < config.n0 {
        return Err(Error::Config(format!("bisection needs {} agents, got {}", config.n0, data.len())));
    }
    let group = config.n0 / config.bits as usize;
    let (mut lo, mut hi) = (config.range_lo, config.range_hi);
    for chunk in data.chunks_exact(group).take(config.bits as usize) {
        let mid = 0.5 * (lo + hi);
        if sanitized_mean(chunk, mid, &config.params, rng) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisection on the first `n0` agents, then the two-stage procedure on the
/// rest with `θ0` replaced by the bisection result. Agents left over from
/// `n0 mod bits` release nothing.
pub fn three_stage<R: Rng + ?Sized>(data: &[f64], config: &EstimatorConfig, rng: &mut R) -> Result<EstimateResult> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    config.check_preliminary()?;
    if config.n0 >= data.len() {
        return Err(Error::Config(format!("n0={} leaves no agents out of n={}", config.n0, data.len())));
    }
    let (prelim_data, rest) = data.split_at(config.n0);
    let prelim = preliminary_bisection(prelim_data, config, rng)?;
    let tail = two_stage_from(rest, prelim, config, rng)?;
    let mut stage_estimates = vec![prelim];
    stage_estimates.extend(tail.stage_estimates);
    let mut clamped = vec![false];
    clamped.extend(tail.clamped);
    Ok(EstimateResult { theta_hat: tail.theta_hat, stage_estimates, clamped })
}

/// Runs `kind` on `X/σ` with every location setting divided by `σ` and
/// scales the result back. With `σ = 1` this is the unscaled estimator.
pub fn estimate<R: Rng + ?Sized>(
    kind: EstimatorKind,
    data: &[f64],
    config: &EstimatorConfig,
    rng: &mut R,
) -> Result<EstimateResult> {
    config.check_sigma()?;
    let run = |data: &[f64], config: &EstimatorConfig, rng: &mut R| match kind {
        EstimatorKind::One => one_stage(data, config, rng),
        EstimatorKind::Two => two_stage(data, config, rng),
        EstimatorKind::Three => three_stage(data, config, rng),
    };
    let sigma = config.sigma;
    if sigma == 1.0 {
        return run(data, config, rng);
    }
    let standardized: Vec<f64> = data.iter().map(|x| x / sigma).collect();
    let unit = EstimatorConfig {
        theta0: config.theta0 / sigma,
        range_lo: config.range_lo / sigma,
        range_hi: config.range_hi / sigma,
        sigma: 1.0,
        ..*config
    };
    Ok(run(&standardized, &unit, rng)?.scaled(sigma))
}

/// Two-stage estimate for data with known standard deviation `sigma`.
pub fn rescaled_estimate<R: Rng + ?Sized>(
    data: &[f64],
    sigma: f64,
    config: &EstimatorConfig,
    rng: &mut R,
) -> Result<EstimateResult> {
    estimate(EstimatorKind::Two, data, &config.with_sigma(sigma), rng)
}

/// Asymptotic variance of the one-stage estimator centered at `θ0`.
pub fn one_stage_asymptotic_variance(theta: f64, theta0: f64, params: &PrivacyParams) -> f64 {
    let t = params.t_eps();
    let d = theta - theta0;
    let phi = std_normal_pdf(d);
    let m = 1.0 - 2.0 * std_normal_cdf(theta0 - theta);
    0.25 / (t * t) / (phi * phi) * (1.0 - t * t * m * m)
}

/// `σ²(π/2)/t_ε²`, the inverse of the largest Fisher information under
/// ε-LDP.
pub fn optimal_asymptotic_variance(params: &PrivacyParams, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!("sigma must be positive and finite, got {sigma}")));
    }
    let t = params.t_eps();
    Ok(sigma * sigma * (PI / 2.0) / (t * t))
}
