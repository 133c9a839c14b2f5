//! Three-stage estimation when only a range for the mean is known: a
//! private bisection over [0, 128] followed by the two-stage procedure.
//!
//! cargo run --release --example three_stage

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use sign_ldp::estimators::{three_stage, EstimatorConfig};
use sign_ldp::PrivacyParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (theta, n) = (84.5, 200_000);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let normal = Normal::new(theta, 1.0)?;
    let data: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();

    let config = EstimatorConfig::new(PrivacyParams::new(1.0)?).with_preliminary(15_000, 7, 0.0, 128.0).with_n1(700);
    let r = three_stage(&data, &config, &mut rng)?;
    for (name, (value, clamped)) in
        ["bisection", "stage 1", "stage 2"].iter().zip(r.stage_estimates.iter().zip(&r.clamped))
    {
        println!("{name:>9}: {value:.5}{}", if *clamped { " (clamped)" } else { "" });
    }
    println!("error {:.5}", r.theta_hat - theta);
    Ok(())
}
