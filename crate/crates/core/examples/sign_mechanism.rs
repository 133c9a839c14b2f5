//! Sanitize Gaussian draws with the sign mechanism and compare the mean
//! released bit with its population value `t_ε(1 − 2Φ(c − θ))`.
//!
//! cargo run --example sign_mechanism -- [epsilon] [center]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use sign_ldp::mechanisms::{rr_matrix, sign_mechanism, verify_ldp, LDP_TOLERANCE};
use sign_ldp::numerics::std_normal_cdf;
use sign_ldp::PrivacyParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let epsilon: f64 = args.next().map_or(Ok(1.0), |s| s.parse())?;
    let center: f64 = args.next().map_or(Ok(0.5), |s| s.parse())?;
    let theta = 0.0;

    let params = PrivacyParams::new(epsilon)?;
    let q = rr_matrix(&params);
    println!("randomized response channel at epsilon = {epsilon}:\n{q}");
    println!("epsilon-LDP: {}", verify_ldp(&q, epsilon, LDP_TOLERANCE)?);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let normal = Normal::new(theta, 1.0)?;
    let n = 200_000;
    let sum: i64 =
        (0..n).map(|_| i64::from(sign_mechanism(normal.sample(&mut rng), center, &params, &mut rng).value())).sum();
    let empirical = sum as f64 / n as f64;
    let population = params.t_eps() * (1.0 - 2.0 * std_normal_cdf(center - theta));
    println!("mean released bit over {n} agents: {empirical:.5} (population {population:.5})");
    Ok(())
}
