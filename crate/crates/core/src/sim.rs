//! Seeded Monte Carlo harness for the scaled mean squared error
//! `n·E(θ̂ − θ_n)²`.
//!
//! Replicate `r` of sweep value `s` draws from its own ChaCha8 stream
//! `(s << 40) | r` under a key derived from the master seed, and results are
//! gathered into index-ordered slots before any reduction. Output therefore
//! does not depend on the worker count.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{
    estimate, one_stage_asymptotic_variance, optimal_asymptotic_variance, EstimateResult, EstimatorConfig,
    EstimatorKind,
};
use crate::mechanisms::PrivacyParams;
use crate::numerics::Probability;

pub const DEFAULT_RESAMPLES: usize = 1000;
/// Default cap on `replicates · n` summed over the sweep.
pub const DEFAULT_BUDGET: u128 = 20_000_000_000;

/// Replicate streams use the low 40 bits; the sweep index sits above them.
const STREAM_SHIFT: u32 = 40;
const BOOTSTRAP_KEY: u64 = 0x9e37_79b9_7f4a_7c15;

pub const CSV_HEADER: &str =
    "sweep_name,sweep_value,n,replicates,scaled_mse,ci_lo,ci_hi,clamp_rate,theory_optimal,theory_one_stage";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    N1,
    Theta0,
    N,
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "n1" => Ok(Self::N1),
            "theta0" => Ok(Self::Theta0),
            "n" => Ok(Self::N),
            other => Err(Error::Config(format!("unknown sweep parameter '{other}' (expected n1|theta0|n)"))),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::N1 => "n1",
            Self::Theta0 => "theta0",
            Self::N => "n",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: EstimatorKind,
    pub estimator: EstimatorConfig,
    pub n: usize,
    pub theta_true: f64,
    /// Local alternative: data are drawn around `θ_n = θ + h/√n`.
    pub h: f64,
    pub replicates: usize,
    pub master_seed: u64,
    /// `None` runs the base settings once and reports it as an `n` sweep.
    pub sweep: Option<Sweep>,
    pub workers: usize,
    pub budget: u128,
    pub resamples: usize,
    pub ci_level: f64,
}

impl ExperimentConfig {
    pub fn new(kind: EstimatorKind, estimator: EstimatorConfig, n: usize, replicates: usize, master_seed: u64) -> Self {
        Self {
            kind,
            estimator,
            n,
            theta_true: 0.0,
            h: 0.0,
            replicates,
            master_seed,
            sweep: None,
            workers: 1,
            budget: DEFAULT_BUDGET,
            resamples: DEFAULT_RESAMPLES,
            ci_level: 0.95,
        }
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta_true = theta;
        self
    }

    pub fn with_local_shift(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_sweep(mut self, param: SweepParam, values: Vec<f64>) -> Self {
        self.sweep = Some(Sweep { param, values });
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    pub fn sweep_name(&self) -> String {
        self.sweep.as_ref().map_or(SweepParam::N, |s| s.param).to_string()
    }

    /// Number of sweep points (1 without a sweep).
    pub fn points(&self) -> usize {
        self.sweep.as_ref().map_or(1, |s| s.values.len())
    }

    /// Settings at sweep index `i`: sample size, estimator config and the
    /// reported sweep value.
    pub fn point(&self, i: usize) -> Result<(usize, EstimatorConfig, f64)> {
        let mut est = self.estimator;
        let mut n = self.n;
        let value = match &self.sweep {
            None => n as f64,
            Some(sweep) => {
                let v = *sweep.values.get(i).ok_or_else(|| Error::Config(format!("sweep index {i} out of range")))?;
                match sweep.param {
                    SweepParam::N1 => est.n1 = Some(as_count(v, "n1")?),
                    SweepParam::Theta0 => est.theta0 = v,
                    SweepParam::N => n = as_count(v, "n")?,
                }
                v
            }
        };
        Ok((n, est, value))
    }

    /// `Σ replicates · n` over the sweep.
    pub fn requested_draws(&self) -> Result<u128> {
        (0..self.points()).try_fold(0u128, |acc, i| Ok(acc + self.replicates as u128 * self.point(i)?.0 as u128))
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(Error::Config(format!("replicates must be >= 2, got {}", self.replicates)));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::Config(format!("ci level must lie in (0, 1), got {}", self.ci_level)));
        }
        if self.resamples == 0 {
            return Err(Error::Config("resamples must be >= 1".into()));
        }
        if !self.theta_true.is_finite() || !self.h.is_finite() {
            return Err(Error::Config("theta and h must be finite".into()));
        }
        if matches!(&self.sweep, Some(s) if s.values.is_empty()) {
            return Err(Error::Config("sweep has no values".into()));
        }
        for i in 0..self.points() {
            let (n, est, _) = self.point(i)?;
            if n == 0 {
                return Err(Error::Config("n must be >= 1".into()));
            }
            if !(est.sigma > 0.0 && est.sigma.is_finite()) {
                return Err(Error::Config(format!("sigma must be positive, got {}", est.sigma)));
            }
            match self.kind {
                EstimatorKind::One => {}
                EstimatorKind::Two => {
                    est.resolved_n1(n)?;
                }
                EstimatorKind::Three => {
                    if est.n0 >= n {
                        return Err(Error::Config(format!("n0={} must be below n={n}", est.n0)));
                    }
                    est.resolved_n1(n - est.n0)?;
                }
            }
        }
        let requested = self.requested_draws()?;
        if requested > self.budget {
            return Err(Error::Budget { requested, limit: self.budget });
        }
        Ok(())
    }
}

fn as_count(v: f64, name: &str) -> Result<usize> {
    if v.fract() != 0.0 || v < 0.0 || !v.is_finite() {
        return Err(Error::Config(format!("{name} must be a nonnegative integer, got {v}")));
    }
    Ok(v as usize)
}

/// One Monte Carlo replicate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replicate {
    /// `θ_n`, the mean the data were drawn around.
    pub theta_n: f64,
    pub result: EstimateResult,
}

impl Replicate {
    pub fn error(&self) -> f64 {
        self.result.theta_hat - self.theta_n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseResult {
    pub sweep_value: f64,
    pub n: usize,
    pub replicates: usize,
    pub scaled_mse: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub clamp_rate: f64,
    pub theory_optimal: f64,
    pub theory_one_stage: f64,
}

fn replicate_rng(master_seed: u64, sweep_index: usize, r: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((sweep_index as u64) << STREAM_SHIFT) | r as u64);
    rng
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))
}

/// Runs every replicate at sweep index `sweep_index`, in replicate order.
pub fn simulate_replicates(config: &ExperimentConfig, sweep_index: usize) -> Result<Vec<Replicate>> {
    config.validate()?;
    replicates_at(config, sweep_index, &pool(config.workers)?)
}

fn replicates_at(config: &ExperimentConfig, sweep_index: usize, pool: &rayon::ThreadPool) -> Result<Vec<Replicate>> {
    if config.replicates as u64 >= 1 << STREAM_SHIFT {
        return Err(Error::Resource("too many replicates for the stream layout".into()));
    }
    let (n, est, _) = config.point(sweep_index)?;
    let theta_n = config.theta_true + config.h / (n as f64).sqrt();
    let sigma = est.sigma;
    pool.install(|| {
        (0..config.replicates)
            .into_par_iter()
            .map_init(
                || Vec::with_capacity(n),
                |data: &mut Vec<f64>, r| {
                    let mut rng = replicate_rng(config.master_seed, sweep_index, r);
                    data.clear();
                    data.extend((0..n).map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        theta_n + sigma * z
                    }));
                    estimate(config.kind, data, &est, &mut rng).map(|result| Replicate { theta_n, result })
                },
            )
            .collect()
    })
}

/// Scaled MSE, bootstrap interval and reference lines for every sweep point.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<MseResult>> {
    config.validate()?;
    let pool = pool(config.workers)?;
    let level = Probability::new(config.ci_level)?;
    (0..config.points())
        .map(|i| {
            let (n, est, sweep_value) = config.point(i)?;
            let reps = replicates_at(config, i, &pool)?;
            let nf = n as f64;
            let scaled: Vec<f64> = reps.iter().map(|r| nf * r.error() * r.error()).collect();
            let scaled_mse = scaled.iter().sum::<f64>() / scaled.len() as f64;
            let mut boot_rng = ChaCha8Rng::seed_from_u64(config.master_seed ^ BOOTSTRAP_KEY);
            boot_rng.set_stream(i as u64);
            let (lo, hi) = bootstrap_ci(&scaled, level, config.resamples, &mut boot_rng)?;
            let clamped = reps.iter().filter(|r| r.result.any_clamped()).count();
            let theta_n = reps[0].theta_n;
            Ok(MseResult {
                sweep_value,
                n,
                replicates: config.replicates,
                scaled_mse,
                // The percentile interval is widened to contain the point
                // estimate when resampling noise puts it just outside.
                ci_lo: lo.min(scaled_mse),
                ci_hi: hi.max(scaled_mse),
                clamp_rate: clamped as f64 / reps.len() as f64,
                theory_optimal: theoretical_reference(
                    ReferenceKind::Optimal,
                    theta_n,
                    est.theta0,
                    &est.params,
                    est.sigma,
                )?,
                theory_one_stage: theoretical_reference(
                    ReferenceKind::One,
                    theta_n,
                    est.theta0,
                    &est.params,
                    est.sigma,
                )?,
            })
        })
        .collect()
}

/// Percentile bootstrap interval for the mean of `values`.
pub fn bootstrap_ci<R: Rng + ?Sized>(
    values: &[f64],
    level: Probability,
    resamples: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::Config(format!("bootstrap needs at least 2 values, got {}", values.len())));
    }
    let level = level.get();
    if !(level > 0.0 && level < 1.0) || resamples == 0 {
        return Err(Error::Domain(format!("need 0 < level < 1 and resamples > 0, got {level}, {resamples}")));
    }
    if values.iter().all(|&v| v == values[0]) {
        return Ok((values[0], values[0]));
    }
    let m = values.len();
    let mut means: Vec<f64> =
        (0..resamples).map(|_| (0..m).map(|_| values[rng.random_range(0..m)]).sum::<f64>() / m as f64).collect();
    means.sort_by(f64::total_cmp);
    let tail = 0.5 * (1.0 - level);
    let idx = |q: f64| ((q * resamples as f64).floor() as usize).min(resamples - 1);
    Ok((means[idx(tail)], means[idx(1.0 - tail)]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    One,
    Two,
    Optimal,
}

/// Asymptotic variance of `√n(θ̂ − θ)` for the given procedure. The
/// two-stage procedure attains the optimal value.
pub fn theoretical_reference(
    kind: ReferenceKind,
    theta: f64,
    theta0: f64,
    params: &PrivacyParams,
    sigma: f64,
) -> Result<f64> {
    let optimal = optimal_asymptotic_variance(params, sigma)?;
    Ok(match kind {
        ReferenceKind::Two | ReferenceKind::Optimal => optimal,
        ReferenceKind::One => sigma * sigma * one_stage_asymptotic_variance(theta / sigma, theta0 / sigma, params),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample Kolmogorov–Smirnov test of `samples` against `N(0, variance)`.
pub fn ks_test_normal(samples: &[f64], variance: f64) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::EmptyData);
    }
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::Domain(format!("variance must be positive, got {variance}")));
    }
    let sd = variance.sqrt();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = crate::numerics::std_normal_cdf(x / sd);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic;
    Ok(KsResult { statistic, p_value: kolmogorov_survival(lambda) })
}

/// `P(K > λ) = 2 Σ_{j≥1} (−1)^{j−1} e^{−2j²λ²}`.
fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Formats a real with 9 significant digits, dropping trailing zeros, in
/// the style of C's `%.9g`.
pub fn format_g9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(mut out: W, sweep_name: &str, results: &[MseResult]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in results {
        writeln!(
            out,
            "{sweep_name},{},{},{},{},{},{},{},{},{}",
            format_g9(r.sweep_value),
            r.n,
            r.replicates,
            format_g9(r.scaled_mse),
            format_g9(r.ci_lo),
            format_g9(r.ci_hi),
            format_g9(r.clamp_rate),
            format_g9(r.theory_optimal),
            format_g9(r.theory_one_stage),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(eps: f64) -> PrivacyParams {
        PrivacyParams::new(eps).unwrap()
    }

    fn small(seed: u64) -> ExperimentConfig {
        ExperimentConfig::new(EstimatorKind::Two, EstimatorConfig::new(params(1.0)), 2000, 40, seed)
            .with_sweep(SweepParam::N1, vec![50.0, 200.0])
    }

    #[test]
    fn g9_formatting() {
        let cases = [
            (7.355_559_126_629_518, "7.35555913"),
            (0.5, "0.5"),
            (100_000.0, "100000"),
            (123_456_789.0, "123456789"),
            (1_234_567_890.0, "1.23456789e+09"),
            (0.000_123_456_789_12, "0.000123456789"),
            (0.000_012_5, "1.25e-05"),
            (-3.0, "-3"),
            (0.0, "0"),
            (f64::INFINITY, "inf"),
            (f64::NEG_INFINITY, "-inf"),
            (f64::NAN, "nan"),
            (46_943.052_1, "46943.0521"),
            (9.999_999_999, "10"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g9(x), want, "{x}");
        }
    }

    #[test]
    fn csv_layout() {
        let r = MseResult {
            sweep_value: 100.0,
            n: 1000,
            replicates: 2,
            scaled_mse: 7.5,
            ci_lo: 7.0,
            ci_hi: 8.0,
            clamp_rate: 0.0,
            theory_optimal: 7.355_559_126_629_518,
            theory_one_stage: f64::INFINITY,
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, "n1", &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "n1,100,1000,2,7.5,7,8,0,7.35555913,inf");
    }

    #[test]
    fn bootstrap_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p95 = Probability::new(0.95).unwrap();
        assert_eq!(bootstrap_ci(&[3.0; 10], p95, 1000, &mut rng).unwrap(), (3.0, 3.0));
        assert!(bootstrap_ci(&[1.0], p95, 1000, &mut rng).is_err());
        assert!(bootstrap_ci(&[1.0, 2.0], Probability::new(1.0).unwrap(), 1000, &mut rng).is_err());
        let values: Vec<f64> = (0..200).map(|i| ((i * 37) % 101) as f64).collect();
        let mean = values.iter().sum::<f64>() / 200.0;
        let (lo, hi) = bootstrap_ci(&values, p95, 1000, &mut rng).unwrap();
        assert!(lo <= mean && mean <= hi && lo < hi);
    }

    #[test]
    fn bootstrap_coverage() {
        // Squared standard normals have mean 1.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p95 = Probability::new(0.95).unwrap();
        let trials = 500;
        let covered = (0..trials)
            .filter(|_| {
                let v: Vec<f64> = (0..200)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        z * z
                    })
                    .collect();
                let (lo, hi) = bootstrap_ci(&v, p95, 400, &mut rng).unwrap();
                lo <= 1.0 && 1.0 <= hi
            })
            .count();
        assert!(covered as f64 >= 0.9 * trials as f64, "{covered}");
    }

    #[test]
    fn reference_lines() {
        let p = params(1.0);
        let opt = theoretical_reference(ReferenceKind::Optimal, 0.0, 0.0, &p, 1.0).unwrap();
        assert!((opt - 7.355_559_126_629_518).abs() < 1e-12);
        assert_eq!(theoretical_reference(ReferenceKind::Two, 0.0, 3.0, &p, 1.0).unwrap(), opt);
        let one = theoretical_reference(ReferenceKind::One, 1.0, 1.0, &p, 1.0).unwrap();
        assert!((one - opt).abs() < 1e-12);
        let far = theoretical_reference(ReferenceKind::One, 0.0, 4.0, &p, 1.0).unwrap();
        assert!(far.is_finite() && far > 1e3);
        let scaled = theoretical_reference(ReferenceKind::One, 0.0, 2.0, &p, 2.0).unwrap();
        let unit = theoretical_reference(ReferenceKind::One, 0.0, 1.0, &p, 1.0).unwrap();
        assert!((scaled - 4.0 * unit).abs() < 1e-9);
    }

    #[test]
    fn kolmogorov_tail() {
        // Standard table values.
        assert!((kolmogorov_survival(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_survival(1.628) - 0.01).abs() < 1e-3);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
        assert!(kolmogorov_survival(5.0) < 1e-20);
    }

    #[test]
    fn ks_accepts_and_rejects() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v: Vec<f64> = (0..2000).map(|_| 2.0 * Distribution::<f64>::sample(&StandardNormal, &mut rng)).collect();
        assert!(ks_test_normal(&v, 4.0).unwrap().p_value > 0.01);
        assert!(ks_test_normal(&v, 1.0).unwrap().p_value < 1e-6);
        assert!(ks_test_normal(&[], 1.0).is_err());
    }

    #[test]
    fn config_checks() {
        let base = small(1);
        assert!(base.validate().is_ok());
        let mut c = base.clone();
        c.replicates = 1;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let c = base.clone().with_sweep(SweepParam::N1, vec![2000.0]);
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let c = base.clone().with_sweep(SweepParam::N1, vec![10.5]);
        assert!(c.validate().is_err());
        let c = base.clone().with_budget(1000);
        assert!(matches!(c.validate(), Err(Error::Budget { requested: 160_000, limit: 1000 })));
        let c = base.clone().with_workers(0);
        assert!(c.validate().is_err());
        assert_eq!(small(1).requested_draws().unwrap(), 160_000);
        let c = base.with_sweep(SweepParam::N, vec![1000.0, 3000.0]);
        assert_eq!(c.requested_draws().unwrap(), 160_000);
    }

    #[test]
    fn identical_runs_match() {
        let a = run_experiment(&small(7)).unwrap();
        let b = run_experiment(&small(7)).unwrap();
        assert_eq!(a, b);
        let c = run_experiment(&small(8)).unwrap();
        assert_ne!(a, c);
        for r in &a {
            assert!(r.ci_lo <= r.scaled_mse && r.scaled_mse <= r.ci_hi);
            assert!(r.scaled_mse >= 0.0);
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let one = run_experiment(&small(9)).unwrap();
        for w in [2, 4, 8] {
            assert_eq!(run_experiment(&small(9).with_workers(w)).unwrap(), one);
        }
    }

    #[test]
    fn sweeps_set_the_right_field() {
        let c = ExperimentConfig::new(EstimatorKind::One, EstimatorConfig::new(params(1.0)), 500, 4, 0)
            .with_sweep(SweepParam::Theta0, vec![0.0, 2.0]);
        let (n, est, v) = c.point(1).unwrap();
        assert_eq!((n, est.theta0, v), (500, 2.0, 2.0));
        let c = c.with_sweep(SweepParam::N, vec![100.0, 300.0]);
        assert_eq!(c.point(1).unwrap().0, 300);
        let reps = simulate_replicates(&c.with_local_shift(2.0), 1).unwrap();
        assert!((reps[0].theta_n - 2.0 / 300f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn clamp_rate_vanishes_for_moderate_n1() {
        let c = ExperimentConfig::new(EstimatorKind::Two, EstimatorConfig::new(params(1.0)), 20_000, 200, 11)
            .with_sweep(SweepParam::N1, vec![1000.0]);
        let r = run_experiment(&c).unwrap();
        assert!(r[0].clamp_rate < 1e-3);
    }

    proptest! {
        #[test]
        fn g9_keeps_nine_significant_digits(mantissa in 1.0f64..10.0, exp in -12i32..15, neg in any::<bool>()) {
            let x = if neg { -1.0 } else { 1.0 } * mantissa * 10f64.powi(exp);
            let back: f64 = format_g9(x).parse().unwrap();
            prop_assert!((back - x).abs() <= 5.01e-9 * x.abs());
        }

        #[test]
        fn bootstrap_interval_brackets_the_mean(values in prop::collection::vec(0.0f64..100.0, 2..60), seed in 0u64..100) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (lo, hi) = bootstrap_ci(&values, Probability::new(0.95).unwrap(), 200, &mut rng).unwrap();
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            // Resampled means can exceed the extremes by rounding only.
            let slack = 1e-12 * max;
            prop_assert!(min - slack <= lo && lo <= hi && hi <= max + slack);
        }
    }
}
