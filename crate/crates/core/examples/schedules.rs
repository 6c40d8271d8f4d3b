//! Stepsizes, weights, batch sizes and threshold iterations of both policies.

use dynbatch::schedules::{beta_recursion_residuals, BetaVariant, SmoothPolicy, StrongPolicy};

fn main() -> dynbatch::error::Result<()> {
    let l = 1.0;
    let smooth = SmoothPolicy::new(0.5, l, 0.5, 0.0, 2, l, BetaVariant::Linear)?;
    let exact = SmoothPolicy::new(0.5, l, 0.5, 0.0, 2, l, BetaVariant::Exact)?;
    println!("accelerated: alpha = {:.6}", smooth.alpha());
    println!("{:>5} {:>10} {:>10} {:>14} {:>18}", "t", "beta lin", "beta exact", "N_t", "sum N");
    for t in [1, 2, 5, 10, 50, 100] {
        println!("{t:>5} {:>10.4} {:>10.4} {:>14} {:>18}", smooth.beta(t)?, exact.beta(t)?, smooth.batch(t)?, smooth.cumulative_calls(t)?);
    }
    let worst = beta_recursion_residuals(BetaVariant::Exact, 1000).iter().fold(0.0f64, |m, r| m.max(r.abs()));
    println!("recursion residual: linear {}, exact max {worst:.2e}", beta_recursion_residuals(BetaVariant::Linear, 1)[0]);
    for sigma_l in [0.1, 1.0, 3.0] {
        let t0 = smooth.t0(sigma_l, 0.5)?;
        println!("sigma_L = {sigma_l}: t0 = {t0}, tail sum from t0 = {:.3e} vs phi/(15 sigma_L^2) = {:.3e}", smooth.tail_sum(t0, 100_000), 0.5 / (15.0 * sigma_l * sigma_l));
    }

    let strong = StrongPolicy::matched(0.5, 4, 0.01, 0.4, l, 0.1)?;
    println!("\nprox-gradient: alpha = {}, zeta = {:.6}, rho = {:.6}, lambda = {:.6}", strong.alpha(), strong.zeta, strong.rho(), strong.lambda());
    for t in [1, 10, 100, 500] {
        println!("  N_{t} = {}", strong.batch(t)?);
    }
    println!("  t0(sigma_L = 1) = {}", strong.t0(1.0)?);
    Ok(())
}
