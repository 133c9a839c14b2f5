//! Solve the staircase program at level `k`, compare with the sign
//! mechanism and sweep the dual certificate.
//!
//! cargo run --example lp_certificate -- [k] [epsilon]

use sign_ldp::lp::{
    build_staircase_lp, candidate_alpha, check_dual_feasibility, dual_certificate, mechanism_from_alpha, solve_primal,
};
use sign_ldp::PrivacyParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().map_or(Ok(6), |s| s.parse())?;
    let epsilon: f64 = args.next().map_or(Ok(1.0), |s| s.parse())?;
    let params = PrivacyParams::new(epsilon)?;

    let lp = build_staircase_lp(k, &params)?;
    let primal = solve_primal(&lp)?;
    let candidate = candidate_alpha(&lp)?;
    let dual = dual_certificate(k, &params)?;
    println!("k = {k}, epsilon = {epsilon}, {} columns", lp.columns());
    println!("primal optimum   {:.12}", primal.value);
    println!("sign mechanism   {:.12}", candidate.value);
    println!("dual certificate {:.12}", dual.value());

    let q = mechanism_from_alpha(&primal, &lp)?;
    println!("optimal channel ({} outputs):\n{q}", q.k_out());

    for eps in [epsilon, 3.0] {
        let report = check_dual_feasibility(k, &PrivacyParams::new(eps)?, 1e-9)?;
        println!(
            "epsilon = {eps}: certificate feasible = {}, worst slack {:.3e} at column {:0width$b}",
            report.feasible,
            report.worst_slack,
            report.worst_column,
            width = k
        );
    }
    Ok(())
}
