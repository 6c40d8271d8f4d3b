use dynbatch::numeric::rng::RngStream;
use dynbatch::oracle::OracleModel;
use dynbatch::problems::{make_random_quadratic, ProblemInstance, QuadraticSpec, SpectrumSpec};
use dynbatch::prox::{ConstraintSpec, RegularizerSpec};
use dynbatch::schedules::{BetaVariant, SmoothPolicy, StrongPolicy};
use dynbatch::solvers::{self, IterateRecording, RunOptions, RunStatus};

fn problem(oracle: OracleModel, constraint: ConstraintSpec, c: f64) -> ProblemInstance {
    let mut spec = QuadraticSpec::new(6, SpectrumSpec::Conditioned { c, l: 1.0 }, oracle);
    spec.constraint = constraint;
    spec.regularizer = RegularizerSpec::L1 { lambda: 0.02 };
    spec.rotate = true;
    spec.seed = 9;
    make_random_quadratic(&spec).unwrap()
}

fn smooth(p: &ProblemInstance) -> SmoothPolicy {
    SmoothPolicy::new(0.5, p.l, 0.5, 0.0, 1, p.l, BetaVariant::Exact).unwrap()
}

#[test]
fn trajectories_are_bitwise_reproducible() {
    let p = problem(OracleModel::random_matrix(0.3, 0.1), ConstraintSpec::AllSpace, 0.1);
    let opts = RunOptions::new(60).record(IterateRecording::Always);
    let a = solvers::run_accelerated(&p, &p.oracle, &smooth(&p), &opts, &RngStream::new(4).child(2)).unwrap();
    let b = solvers::run_accelerated(&p, &p.oracle, &smooth(&p), &opts, &RngStream::new(4).child(2)).unwrap();
    assert_eq!(a, b);
    let strong = StrongPolicy::matched(0.5, 2, 0.01, 0.3, p.l, p.c).unwrap();
    let a = solvers::run_prox_gradient(&p, &p.oracle, &strong, &opts, &RngStream::new(4)).unwrap();
    let b = solvers::run_prox_gradient(&p, &p.oracle, &strong, &opts, &RngStream::new(4)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn recording_does_not_perturb_the_trajectory() {
    let p = problem(OracleModel::additive(0.5), ConstraintSpec::AllSpace, 0.1);
    let s = RngStream::new(11);
    let on = solvers::run_accelerated(&p, &p.oracle, &smooth(&p), &RunOptions::new(40).record(IterateRecording::Always), &s).unwrap();
    let off = solvers::run_accelerated(&p, &p.oracle, &smooth(&p), &RunOptions::new(40).record(IterateRecording::Never), &s).unwrap();
    for (a, b) in on.records.iter().zip(&off.records) {
        assert_eq!(a.gap.to_bits(), b.gap.to_bits());
        assert!(b.iterate.is_none());
    }
}

#[test]
fn iterates_stay_feasible() {
    let boxed = ConstraintSpec::uniform_box(6, -0.4, 0.3);
    let p = problem(OracleModel::random_matrix(0.5, 0.5), boxed, 0.1);
    let opts = RunOptions::new(80).record(IterateRecording::Always);
    let run = solvers::run_accelerated(&p, &p.oracle, &smooth(&p), &opts, &RngStream::new(1)).unwrap();
    let strong = StrongPolicy::matched(0.5, 1, 0.01, 0.3, p.l, p.c).unwrap();
    let run2 = solvers::run_prox_gradient(&p, &p.oracle, &strong, &opts, &RngStream::new(1)).unwrap();
    for r in run.records.iter().chain(&run2.records) {
        assert!(p.constraint.contains(r.iterate.as_ref().unwrap(), 1e-9));
        assert!(r.gap >= -1e-12);
    }
}

#[test]
fn cumulative_calls_match_schedules() {
    let p = problem(OracleModel::additive(0.1), ConstraintSpec::AllSpace, 0.1);
    let policy = smooth(&p);
    let run = solvers::run_accelerated(&p, &p.oracle, &policy, &RunOptions::new(50), &RngStream::new(1)).unwrap();
    let mut total = 0u64;
    for r in &run.records {
        total += policy.batch(r.t).unwrap();
        assert_eq!(r.batch, policy.batch(r.t).unwrap());
        assert_eq!(r.cum_calls, total);
        assert_eq!(u128::from(r.cum_calls), policy.cumulative_calls(r.t).unwrap());
    }
    let strong = StrongPolicy::new(0.5, 0.9, 3, 0.01, p.l, p.c).unwrap();
    let run = solvers::run_prox_gradient(&p, &p.oracle, &strong, &RunOptions::new(50), &RngStream::new(1)).unwrap();
    for r in &run.records {
        assert_eq!(u128::from(r.cum_calls), strong.cumulative_calls(r.t).unwrap());
    }
}

#[test]
fn budget_exhaustion_is_reported() {
    let p = problem(OracleModel::additive(0.1), ConstraintSpec::AllSpace, 0.1);
    let policy = smooth(&p);
    let run = solvers::run_accelerated(&p, &p.oracle, &policy, &RunOptions::new(1000).budget(10_000), &RngStream::new(1)).unwrap();
    assert_eq!(run.status, RunStatus::BudgetExhausted);
    assert!(run.cum_calls() <= 10_000);
    let next = policy.batch(run.records.len() as u64 + 1).unwrap();
    assert!(run.cum_calls() + next > 10_000);
}

#[test]
fn noiseless_prox_gradient_matches_deterministic_method() {
    let p = problem(OracleModel::noiseless(), ConstraintSpec::uniform_box(6, -0.5, 0.5), 0.2);
    let strong = StrongPolicy::new(0.7, 0.8, 1, 0.01, p.l, p.c).unwrap();
    let opts = RunOptions::new(100).record(IterateRecording::Always);
    let run = solvers::run_prox_gradient(&p, &p.oracle, &strong, &opts, &RngStream::new(1)).unwrap();
    let init = p.constraint.project(&[0.0; 6]);
    let reference = solvers::deterministic_prox_gradient(&p, strong.alpha(), &init, 100).unwrap();
    for (r, x) in run.records.iter().zip(&reference) {
        assert_eq!(r.iterate.as_ref().unwrap(), x);
    }
}
