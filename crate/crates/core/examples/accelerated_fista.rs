//! Stochastic accelerated method on an L1-regularized least-squares instance,
//! with the observed gap compared to its theoretical bound.

use dynbatch::harness::experiment::theorem1_audit;
use dynbatch::harness::{run_experiment, ExperimentConfig, Policy};

const CONFIG: &str = "
experiment.name = accelerated_fista
run.algorithm = accelerated
run.horizon = 200
run.reps = 20
problem.dim = 30
problem.spectrum = rank_deficient
problem.rotate = true
regularizer.kind = l1
regularizer.lambda = 0.01
oracle.kind = random_matrix
oracle.scale = 0.2
oracle.vector_scale = 0.2
policy.n0 = 2
policy.delta = 0
";

fn main() -> dynbatch::error::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG)?;
    let (problem, policy) = cfg.build()?;
    let Policy::Smooth(policy) = policy else { unreachable!() };
    let result = run_experiment(&cfg)?;
    println!("g* = {:.6}, sigma* = {:.4}, sigma_L = {:.4}, t0 = {}", problem.g_star, problem.sigma_star, problem.sigma_l, result.bounds.t0);
    let audit = theorem1_audit(&result, &problem, &policy)?;
    println!("{:>5} {:>12} {:>12} {:>12} {:>16}", "t", "gap", "se", "bound", "oracle calls");
    for (t, gap, bound) in audit.iter().filter(|(t, ..)| [2, 5, 10, 20, 50, 100, 200].contains(t)) {
        let row = result.row(*t).unwrap();
        println!("{t:>5} {gap:>12.4e} {:>12.2e} {bound:>12.4e} {:>16}", row.gap_se, row.cum_calls);
    }
    if let Some(fit) = result.rates.gap_power {
        println!("fitted gap slope {:.3} (r^2 {:.4})", fit.rate, fit.r_squared);
    }
    Ok(())
}
