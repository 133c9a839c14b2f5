//! Estimation with a known standard deviation: the data are standardized,
//! estimated, and scaled back.
//!
//! cargo run --release --example known_sigma

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use sign_ldp::estimators::{optimal_asymptotic_variance, rescaled_estimate, EstimatorConfig};
use sign_ldp::PrivacyParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (theta, n) = (3.0, 100_000);
    let params = PrivacyParams::new(1.0)?;
    let config = EstimatorConfig::new(params).with_theta0(2.5).with_n1(3000);
    for sigma in [0.5, 1.0, 2.0, 5.0] {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let normal = Normal::new(theta, sigma)?;
        let data: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        let r = rescaled_estimate(&data, sigma, &config, &mut rng)?;
        let sd = (optimal_asymptotic_variance(&params, sigma)? / n as f64).sqrt();
        println!("sigma = {sigma}: estimate {:.5}, asymptotic sd {sd:.5}", r.theta_hat);
    }
    Ok(())
}
