//! Prox-gradient method with geometrically growing batches on a strongly
//! convex box-constrained problem.

use dynbatch::harness::experiment::theorem2_audit;
use dynbatch::harness::{run_experiment, ExperimentConfig};

const CONFIG: &str = "
experiment.name = strong_convexity
run.algorithm = prox_gradient
run.horizon = 120
run.reps = 30
problem.dim = 10
problem.c = 0.2
problem.rotate = true
regularizer.kind = squared_l2
regularizer.lambda = 0.05
constraint.kind = box
constraint.lo = -1
constraint.hi = 1
oracle.kind = additive
oracle.sigma = 1
policy.mu = 0.8
policy.n0 = 4
policy.phi = 0.01
";

fn main() -> dynbatch::error::Result<()> {
    let result = run_experiment(&ExperimentConfig::parse(CONFIG)?)?;
    let b = &result.bounds;
    println!("rho = {:.5}, C = {:.4}, t0 = {}", b.rho.unwrap(), b.c.unwrap(), b.t0);
    println!("{:>5} {:>12} {:>12} {:>12}", "t", "E|x-x*|^2", "C rho^(t+1)", "N_t");
    for (t, d, bound) in theorem2_audit(&result)? {
        if t % 20 == 0 || t == 1 {
            println!("{t:>5} {d:>12.4e} {bound:>12.4e} {:>12}", result.row(t).unwrap().n_t);
        }
    }
    if let Some(fit) = result.rates.dist_sq_geometric {
        println!("fitted contraction {:.5}", fit.rate);
    }
    Ok(())
}
