//! A small Monte Carlo sweep over the stage-1 size, written as CSV, plus a
//! normality check of the rescaled errors.
//!
//! cargo run --release --example simulate -- [replicates]

use sign_ldp::estimators::{EstimatorConfig, EstimatorKind};
use sign_ldp::sim::{ks_test_normal, run_experiment, simulate_replicates, write_csv, ExperimentConfig, SweepParam};
use sign_ldp::PrivacyParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let replicates: usize = std::env::args().nth(1).map_or(Ok(500), |s| s.parse())?;
    let n = 20_000;
    let estimator = EstimatorConfig::new(PrivacyParams::new(1.0)?);
    let config = ExperimentConfig::new(EstimatorKind::Two, estimator, n, replicates, 42)
        .with_sweep(SweepParam::N1, vec![50.0, 200.0, 1000.0, 5000.0])
        .with_workers(std::thread::available_parallelism().map_or(1, |w| w.get()));

    let results = run_experiment(&config)?;
    write_csv(std::io::stdout().lock(), &config.sweep_name(), &results)?;

    let reps = simulate_replicates(&config, 2)?;
    let errors: Vec<f64> = reps.iter().map(|r| (n as f64).sqrt() * r.error()).collect();
    let ks = ks_test_normal(&errors, results[2].theory_optimal)?;
    eprintln!("n1 = 1000: KS statistic {:.4}, p-value {:.3}", ks.statistic, ks.p_value);
    Ok(())
}
