//! Fisher information of the sign mechanism across privacy levels, checked
//! against the quantized model and rescaled for a known σ.
//!
//! cargo run --example fisher_information

use sign_ldp::estimators::optimal_asymptotic_variance;
use sign_ldp::mechanisms::rr_matrix;
use sign_ldp::quantized::{fisher_info_quantized, half_split, scaled_fisher_info, sign_fisher_info};
use sign_ldp::{PrivacyParams, QuantizedModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>8} {:>10} {:>12} {:>12} {:>12}", "epsilon", "t_eps", "info", "info(k=16)", "variance");
    let model = QuantizedModel::new(16)?;
    for epsilon in [0.1, 0.25, 0.5, 1.0, 1.04, 2.0, 4.0] {
        let params = PrivacyParams::new(epsilon)?;
        let info = sign_fisher_info(&params);
        let channel = rr_matrix(&params).compose(&half_split(16)?)?;
        let quantized = fisher_info_quantized(&channel, &model)?;
        println!(
            "{epsilon:>8} {:>10.6} {:>12.9} {:>12.9} {:>12.6}",
            params.t_eps(),
            info.value(),
            quantized.value(),
            optimal_asymptotic_variance(&params, 1.0)?
        );
    }

    let params = PrivacyParams::new(1.0)?;
    for sigma in [0.5, 1.0, 2.0] {
        let info = scaled_fisher_info(&params, sigma)?;
        println!(
            "sigma = {sigma}: information {:.9}, information * sigma^2 = {:.9}",
            info.value(),
            info.value() * sigma * sigma
        );
    }
    Ok(())
}
