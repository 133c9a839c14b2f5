//! Command-line front end: `fisher`, `lp-verify`, `simulate`, `estimate`.
//!
//! [`run`] parses arguments and returns the process exit code:
//! 0 success, 1 usage or parse error, 2 verification failure, 3 I/O error,
//! 4 budget exceeded.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::estimators::{estimate, optimal_asymptotic_variance, EstimatorConfig, EstimatorKind};
use crate::lp::{self, VALUE_TOLERANCE};
use crate::mechanisms::{rr_matrix, PrivacyParams};
use crate::quantized::{fisher_info_quantized, half_split, scaled_fisher_info, sign_fisher_info, QuantizedModel};
use crate::sim::{self, ExperimentConfig, Sweep, SweepParam};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// Keys a manifest adds on top of the experiment settings; the config
/// reader skips them.
const METADATA_KEYS: [&str; 5] = ["subcommand", "tool_version", "seed", "output", "config"];

/// Feasibility tolerance for the dual sweep in `lp-verify`.
const DUAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "sign-ldp", version, about = "Private Gaussian mean estimation with the sign mechanism")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fisher information and optimal variance of the sign mechanism.
    Fisher {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Also evaluate the sign mechanism on the k-level quantized model.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Solve the staircase program at level k and check the dual certificate.
    LpVerify {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        epsilon: f64,
    },
    /// Run a Monte Carlo experiment described by a config file.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Defaults to `<config stem>.csv` in the working directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Estimate a mean from a data file or synthetic draws.
    Estimate(EstimateArgs),
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long, default_value = "two")]
    estimator: String,
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta0: f64,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long, default_value_t = 15_000)]
    n0: usize,
    #[arg(long, default_value_t = 7)]
    bits: u32,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    range_lo: f64,
    #[arg(long, default_value_t = 128.0, allow_hyphen_values = true)]
    range_hi: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Newline-separated values; blank lines and `#` comments are skipped.
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    input: Option<PathBuf>,
    /// Draw `n` values from N(theta, sigma²).
    #[arg(long, requires_all = ["n", "theta"])]
    synthetic: bool,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Verify(String),
    Io(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => Failure::Io(e.to_string()),
            Error::Budget { .. } => Failure::Budget(e.to_string()),
            Error::Solver(_) => Failure::Verify(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Verify(_) => EXIT_VERIFY,
            Failure::Io(_) => EXIT_IO,
            Failure::Budget(_) => EXIT_BUDGET,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Verify(m) | Failure::Io(m) | Failure::Budget(m) => m,
        }
    }
}

/// Runs the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Fisher { epsilon, sigma, k } => cmd_fisher(epsilon, sigma, k, out),
        Command::LpVerify { k, epsilon } => cmd_lp_verify(k, epsilon, out),
        Command::Simulate { config, seed, workers, output } => {
            cmd_simulate(&config, seed, workers, output.as_deref(), out)
        }
        Command::Estimate(args) => cmd_estimate(&args, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn emit(out: &mut dyn Write, value: &Value) -> std::result::Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Failure::Io(e.to_string()))
}

/// JSON number, or the string `"inf"` / `"-inf"` / `"nan"`.
fn real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(sim::format_g9(x))
    }
}

fn privacy(epsilon: f64) -> std::result::Result<PrivacyParams, Failure> {
    PrivacyParams::new(epsilon).map_err(|e| Failure::Usage(e.to_string()))
}

fn cmd_fisher(epsilon: f64, sigma: f64, k: Option<usize>, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let params = privacy(epsilon)?;
    let info = sign_fisher_info(&params);
    let scaled = scaled_fisher_info(&params, sigma)?;
    let variance = optimal_asymptotic_variance(&params, sigma)?;
    let mut report = json!({
        "epsilon": epsilon,
        "t_eps": params.t_eps(),
        "sign_fisher_info": info.value(),
        "scaled_fisher_info": scaled.value(),
        "optimal_variance": real(variance),
    });
    if let Some(k) = k {
        let model = QuantizedModel::new(k)?;
        let q = rr_matrix(&params).compose(&half_split(k)?)?;
        let check = fisher_info_quantized(&q, &model)?.value();
        report["quantized_check"] = json!({ "k": k, "fisher_info": check });
    }
    emit(out, &report)
}

fn cmd_lp_verify(k: usize, epsilon: f64, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    if k < 2 || !k.is_multiple_of(2) || k > lp::MAX_SOLVE_LEVEL {
        return Err(Failure::Usage(format!("k must be even in [2, {}], got {k}", lp::MAX_SOLVE_LEVEL)));
    }
    let params = privacy(epsilon)?;
    let program = lp::build_staircase_lp(k, &params)?;
    let primal = lp::solve_primal(&program)?;
    let candidate = lp::candidate_alpha(&program)?;
    let dual = lp::dual_certificate(k, &params)?;
    let sweep = lp::check_dual_feasibility(k, &params, DUAL_TOLERANCE)?;
    let report = json!({
        "k": k,
        "epsilon": epsilon,
        "primal_value": primal.value,
        "candidate_value": candidate.value,
        "dual_value": dual.value(),
        "feasible": sweep.feasible,
        "worst_slack": sweep.worst_slack,
        "worst_column": sweep.worst_column,
    });
    emit(out, &report)?;
    let chain = (primal.value - candidate.value).abs() <= VALUE_TOLERANCE
        && (primal.value - dual.value()).abs() <= VALUE_TOLERANCE;
    if chain && sweep.feasible {
        Ok(())
    } else {
        Err(Failure::Verify(format!(
            "equality chain fails at k={k}, epsilon={epsilon}: primal {:.12}, candidate {:.12}, dual {:.12}, worst slack {:e}",
            primal.value,
            candidate.value,
            dual.value(),
            sweep.worst_slack
        )))
    }
}

fn read_file(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn cmd_simulate(
    config: &Path,
    seed: u64,
    workers: usize,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let text = read_file(config)?;
    let mut experiment = experiment_from_config(&text, seed)?;
    experiment.workers = workers;
    let output = match output {
        Some(p) => p.to_path_buf(),
        None => {
            let stem = config.file_stem().map_or_else(|| "simulate".into(), |s| s.to_os_string());
            PathBuf::from(stem).with_extension("csv")
        }
    };
    let results = sim::run_experiment(&experiment)?;

    let mut csv = Vec::new();
    sim::write_csv(&mut csv, &experiment.sweep_name(), &results)?;
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", output.display()));
    fs::write(&output, &csv).map_err(io)?;

    let mut manifest = format!(
        "# sign-ldp run manifest\nsubcommand = simulate\ntool_version = {}\nseed = {seed}\nconfig = {}\noutput = {}\n",
        env!("CARGO_PKG_VERSION"),
        config.display(),
        output.display()
    );
    for (key, value) in resolved_keys(&experiment) {
        manifest.push_str(&format!("{key} = {value}\n"));
    }
    let manifest_path = manifest_path(&output);
    fs::write(&manifest_path, manifest).map_err(|e| Failure::Io(format!("{}: {e}", manifest_path.display())))?;

    emit(
        out,
        &json!({ "output": output.display().to_string(), "manifest": manifest_path.display().to_string(), "rows": results.len() }),
    )
}

/// `<output>.manifest`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_os_string();
    name.push(".manifest");
    PathBuf::from(name)
}

/// Parses flat `key = value` text. `#` starts a comment; blank lines are
/// skipped; a repeated key is an error.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, message: format!("expected 'key = value', got '{line}'") })?;
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(Error::Parse { line: i + 1, message: "empty key".into() });
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::Parse { line: i + 1, message: format!("duplicate key '{key}'") });
        }
    }
    Ok(map)
}

fn take<T: std::str::FromStr>(map: &mut BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    match map.remove(key) {
        None => Ok(None),
        Some(v) => v.parse().map(Some).map_err(|_| Error::Config(format!("cannot parse {key} = '{v}'"))),
    }
}

fn list(value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad sweep value '{}'", s.trim()))))
        .collect()
}

/// Builds an experiment from config text. Recognized keys: `estimator`,
/// `epsilon`, `theta`, `h`, `theta0`, `n`, `n1` (integer or `auto`), `n0`,
/// `bits`, `range_lo`, `range_hi`, `sigma`, `replicates`, `sweep`,
/// `sweep_values`, `budget`, `resamples`, `ci_level`.
pub fn experiment_from_config(text: &str, seed: u64) -> Result<ExperimentConfig> {
    let mut map = parse_config(text)?;
    for key in METADATA_KEYS {
        map.remove(key);
    }
    let kind = take::<EstimatorKind>(&mut map, "estimator")?.unwrap_or(EstimatorKind::Two);
    let epsilon = take(&mut map, "epsilon")?.ok_or_else(|| Error::Config("missing key 'epsilon'".into()))?;
    let n = take(&mut map, "n")?.ok_or_else(|| Error::Config("missing key 'n'".into()))?;
    let replicates = take(&mut map, "replicates")?.ok_or_else(|| Error::Config("missing key 'replicates'".into()))?;
    let mut est = EstimatorConfig::new(PrivacyParams::new(epsilon)?);
    if let Some(v) = take(&mut map, "theta0")? {
        est.theta0 = v;
    }
    est.n1 = match map.remove("n1").as_deref() {
        None | Some("auto") => None,
        Some(v) => Some(v.parse().map_err(|_| Error::Config(format!("cannot parse n1 = '{v}'")))?),
    };
    if let Some(v) = take(&mut map, "n0")? {
        est.n0 = v;
    }
    if let Some(v) = take(&mut map, "bits")? {
        est.bits = v;
    }
    if let Some(v) = take(&mut map, "range_lo")? {
        est.range_lo = v;
    }
    if let Some(v) = take(&mut map, "range_hi")? {
        est.range_hi = v;
    }
    if let Some(v) = take(&mut map, "sigma")? {
        est.sigma = v;
    }
    let mut exp = ExperimentConfig::new(kind, est, n, replicates, seed);
    if let Some(v) = take(&mut map, "theta")? {
        exp.theta_true = v;
    }
    if let Some(v) = take(&mut map, "h")? {
        exp.h = v;
    }
    if let Some(v) = take(&mut map, "budget")? {
        exp.budget = v;
    }
    if let Some(v) = take(&mut map, "resamples")? {
        exp.resamples = v;
    }
    if let Some(v) = take(&mut map, "ci_level")? {
        exp.ci_level = v;
    }
    let sweep = take::<SweepParam>(&mut map, "sweep")?;
    let values = map.remove("sweep_values");
    exp.sweep = match (sweep, values) {
        (None, None) => None,
        (Some(param), Some(v)) => Some(Sweep { param, values: list(&v)? }),
        _ => return Err(Error::Config("'sweep' and 'sweep_values' must be given together".into())),
    };
    if let Some(key) = map.keys().next() {
        return Err(Error::Config(format!("unknown key '{key}'")));
    }
    Ok(exp)
}

/// Every experiment setting in config syntax, with defaults filled in.
/// The worker count is left out because it does not affect results.
pub fn resolved_keys(exp: &ExperimentConfig) -> Vec<(&'static str, String)> {
    let est = &exp.estimator;
    let mut keys = vec![
        ("estimator", exp.kind.to_string()),
        ("epsilon", est.params.epsilon().to_string()),
        ("theta", exp.theta_true.to_string()),
        ("h", exp.h.to_string()),
        ("theta0", est.theta0.to_string()),
        ("n", exp.n.to_string()),
        ("n1", est.n1.map_or_else(|| "auto".to_string(), |v| v.to_string())),
        ("n0", est.n0.to_string()),
        ("bits", est.bits.to_string()),
        ("range_lo", est.range_lo.to_string()),
        ("range_hi", est.range_hi.to_string()),
        ("sigma", est.sigma.to_string()),
        ("replicates", exp.replicates.to_string()),
    ];
    if let Some(sweep) = &exp.sweep {
        keys.push(("sweep", sweep.param.to_string()));
        let values: Vec<String> = sweep.values.iter().map(f64::to_string).collect();
        keys.push(("sweep_values", values.join(",")));
    }
    keys.push(("budget", exp.budget.to_string()));
    keys.push(("resamples", exp.resamples.to_string()));
    keys.push(("ci_level", exp.ci_level.to_string()));
    keys
}

/// Reals from newline-separated text.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 =
            line.parse().map_err(|_| Error::Parse { line: i + 1, message: format!("not a number: '{line}'") })?;
        if !v.is_finite() {
            return Err(Error::Parse { line: i + 1, message: format!("non-finite value '{line}'") });
        }
        values.push(v);
    }
    Ok(values)
}

fn cmd_estimate(args: &EstimateArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let kind: EstimatorKind = args.estimator.parse()?;
    let params = privacy(args.epsilon)?;
    let mut config = EstimatorConfig::new(params)
        .with_theta0(args.theta0)
        .with_preliminary(args.n0, args.bits, args.range_lo, args.range_hi)
        .with_sigma(args.sigma);
    config.n1 = args.n1;
    let mut data_rng = ChaCha8Rng::seed_from_u64(args.seed);
    let data = match &args.input {
        Some(path) => parse_values(&read_file(path)?)?,
        None => {
            let (n, theta) = (args.n.unwrap_or(0), args.theta.unwrap_or(0.0));
            (0..n)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut data_rng);
                    theta + args.sigma * z
                })
                .collect()
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    rng.set_stream(1);
    let result = estimate(kind, &data, &config, &mut rng)?;
    emit(
        out,
        &json!({
            "theta_hat": result.theta_hat,
            "stages": result.stage_estimates,
            "clamped_flags": result.clamped,
        }),
    )
}
