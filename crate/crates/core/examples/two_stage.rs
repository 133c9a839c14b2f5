//! One-stage versus two-stage estimation from the same data when the
//! initial guess is off by one and a half standard deviations.
//!
//! cargo run --release --example two_stage

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use sign_ldp::estimators::{
    one_stage, one_stage_asymptotic_variance, optimal_asymptotic_variance, two_stage, EstimatorConfig,
};
use sign_ldp::PrivacyParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (theta, theta0, n) = (1.3, -0.2, 100_000);
    let params = PrivacyParams::new(1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let normal = Normal::new(theta, 1.0)?;
    let data: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();

    let config = EstimatorConfig::new(params).with_theta0(theta0).with_n1(3000);
    let one = one_stage(&data, &config, &mut rng)?;
    let two = two_stage(&data, &config, &mut rng)?;
    println!("true mean {theta}, initial guess {theta0}, n = {n}");
    println!("one-stage estimate {:.5}", one.theta_hat);
    println!("two-stage estimate {:.5} (stage 1: {:.5})", two.theta_hat, two.stage_estimates[0]);

    let sd = |v: f64| (v / n as f64).sqrt();
    println!("asymptotic sd, one-stage: {:.5}", sd(one_stage_asymptotic_variance(theta, theta0, &params)));
    println!("asymptotic sd, optimal:   {:.5}", sd(optimal_asymptotic_variance(&params, 1.0)?));
    Ok(())
}
