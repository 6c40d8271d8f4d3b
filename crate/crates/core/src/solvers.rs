//! The accelerated (FISTA-type) and plain proximal gradient methods with
//! dynamic mini-batches, recording per-iteration summaries and noise-ledger
//! terms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::rng::RngStream;
use crate::numeric::vector;
use crate::oracle::{minibatch_gradient, OracleCounter, OracleModel};
use crate::problems::{ProblemInstance, FEASIBILITY_TOL};
use crate::prox::prox_step;
use crate::schedules::{SmoothPolicy, StrongPolicy};

/// Iterates are stored by default only up to this dimension.
pub const ITERATE_RECORD_MAX_DIM: usize = 50;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterateRecording {
    #[default]
    Auto,
    Always,
    Never,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub horizon: u64,
    pub budget: u64,
    pub record: IterateRecording,
    /// Starting point; the projection of the origin when absent.
    pub init: Option<Vec<f64>>,
}

impl RunOptions {
    pub fn new(horizon: u64) -> Self {
        RunOptions { horizon, budget: u64::MAX, record: IterateRecording::Auto, init: None }
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn record(mut self, record: IterateRecording) -> Self {
        self.record = record;
        self
    }

    pub fn init(mut self, init: Vec<f64>) -> Self {
        self.init = Some(init);
        self
    }

    fn keeps_iterates(&self, d: usize) -> bool {
        match self.record {
            IterateRecording::Auto => d <= ITERATE_RECORD_MAX_DIM,
            IterateRecording::Always => true,
            IterateRecording::Never => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    BudgetExhausted,
    NumericalFailure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: u64,
    pub batch: u64,
    pub cum_calls: u64,
    /// `z^t` (accelerated) or `x^{t+1}` (prox-gradient).
    pub iterate: Option<Vec<f64>>,
    pub dist_sq: f64,
    pub gap: f64,
    /// `|s^t - x*|^2`, accelerated method only.
    pub s_dist_sq: Option<f64>,
    pub delta_a: f64,
    pub delta_m: f64,
    pub alpha: f64,
    pub beta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<IterationRecord>,
    pub status: RunStatus,
    pub start_dist_sq: f64,
    pub start_gap: f64,
}

impl Trajectory {
    pub fn cum_calls(&self) -> u64 {
        self.records.last().map_or(0, |r| r.cum_calls)
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.gap).collect()
    }
}

/// `y^{t+1} = z^t + ((beta_t - 1) / beta_{t+1}) (z^t - z^{t-1})`
pub fn extrapolate(z: &[f64], z_prev: &[f64], beta: f64, beta_next: f64) -> Vec<f64> {
    let coef = (beta - 1.0) / beta_next;
    z.iter().zip(z_prev).map(|(a, b)| coef * (a - b) + a).collect()
}

/// `s^t = beta_t z^t - (beta_t - 1) z^{t-1}`
pub fn s_point(z: &[f64], z_prev: &[f64], beta: f64) -> Vec<f64> {
    z.iter().zip(z_prev).map(|(a, b)| beta * a - (beta - 1.0) * b).collect()
}

/// `(alpha^2 beta^2 / (1 - L alpha) |eps|^2, 2 alpha beta <eps, x* - s_prev>)`
pub fn ledger_terms(eps: &[f64], s_prev: &[f64], x_star: &[f64], alpha: f64, beta: f64, l: f64) -> Result<(f64, f64)> {
    let margin = 1.0 - l * alpha;
    if !(margin > 0.0) {
        return Err(Error::param("alpha", format!("need 1 - L alpha > 0, got {margin}")));
    }
    let da = alpha * alpha * beta * beta / margin * vector::norm_sq(eps);
    let dm = 2.0 * alpha * beta * eps.iter().zip(x_star.iter().zip(s_prev)).map(|(e, (x, s))| e * (x - s)).sum::<f64>();
    Ok((da, dm))
}

fn start_point(problem: &ProblemInstance, opts: &RunOptions) -> Result<Vec<f64>> {
    match &opts.init {
        Some(x) => {
            vector::check_dim(problem.dim, x.len())?;
            let violation = problem.constraint.violation(x);
            if violation > FEASIBILITY_TOL {
                return Err(Error::Infeasible { violation });
            }
            Ok(x.clone())
        }
        None => Ok(problem.constraint.project(&vec![0.0; problem.dim])),
    }
}

fn check_step(problem: &ProblemInstance, alpha: f64, horizon: u64) -> Result<()> {
    if horizon < 1 {
        return Err(Error::param("T", "horizon must be at least 1"));
    }
    if !(alpha > 0.0 && alpha * problem.l < 1.0) {
        return Err(Error::param("alpha", format!("stepsize {alpha} must lie in (0, 1/L) with L = {}", problem.l)));
    }
    Ok(())
}

fn finite_gap(problem: &ProblemInstance, x: &[f64]) -> Option<f64> {
    if !vector::all_finite(x) {
        return None;
    }
    let g = problem.gap_unchecked(x);
    g.is_finite().then_some(g)
}

/// Accelerated method: `z^t = prox(y^t, batch gradient at y^t, alpha)`
/// followed by the extrapolation step, starting from `y^1 = z^0`.
pub fn run_accelerated(
    problem: &ProblemInstance,
    model: &OracleModel,
    policy: &SmoothPolicy,
    opts: &RunOptions,
    stream: &RngStream,
) -> Result<Trajectory> {
    let alpha = policy.alpha();
    check_step(problem, alpha, opts.horizon)?;
    let keep = opts.keeps_iterates(problem.dim);
    let z0 = start_point(problem, opts)?;
    let mut traj = Trajectory {
        records: Vec::new(),
        status: RunStatus::Completed,
        start_dist_sq: problem.dist_sq_to_star(&z0),
        start_gap: problem.gap_unchecked(&z0),
    };
    let mut betas = policy.betas();
    let mut beta = betas.next().unwrap_or(1.0);
    let mut z_prev = z0.clone();
    let mut y = z0.clone();
    let mut s_prev = z0;
    let mut counter = OracleCounter::new();
    for t in 1..=opts.horizon {
        let n = policy.batch(t)?;
        if counter.calls().checked_add(n).is_none_or(|c| c > opts.budget) {
            traj.status = RunStatus::BudgetExhausted;
            break;
        }
        let beta_next = betas.next().unwrap_or(beta);
        let batch = minibatch_gradient(model, problem, &y, n, &stream.child(t as u32), &mut counter)?;
        let eps = vector::sub(&batch.grad, &problem.gradient_unchecked(&y));
        let (delta_a, delta_m) = ledger_terms(&eps, &s_prev, &problem.x_star, alpha, beta, problem.l)?;
        let z = prox_step(&problem.regularizer, &problem.constraint, &y, &batch.grad, alpha)?;
        let Some(gap) = finite_gap(problem, &z) else {
            traj.status = RunStatus::NumericalFailure;
            break;
        };
        let s = s_point(&z, &z_prev, beta);
        y = extrapolate(&z, &z_prev, beta, beta_next);
        traj.records.push(IterationRecord {
            t,
            batch: n,
            cum_calls: counter.calls(),
            iterate: keep.then(|| z.clone()),
            dist_sq: problem.dist_sq_to_star(&z),
            gap,
            s_dist_sq: Some(problem.dist_sq_to_star(&s)),
            delta_a,
            delta_m,
            alpha,
            beta: Some(beta),
        });
        z_prev = z;
        s_prev = s;
        beta = beta_next;
    }
    Ok(traj)
}

/// Proximal gradient method: `x^{t+1} = prox(x^t, batch gradient at x^t, mu / L)`.
pub fn run_prox_gradient(
    problem: &ProblemInstance,
    model: &OracleModel,
    policy: &StrongPolicy,
    opts: &RunOptions,
    stream: &RngStream,
) -> Result<Trajectory> {
    problem.require_strongly_convex()?;
    let alpha = policy.alpha();
    check_step(problem, alpha, opts.horizon)?;
    let keep = opts.keeps_iterates(problem.dim);
    let mut x = start_point(problem, opts)?;
    let mut traj = Trajectory {
        records: Vec::new(),
        status: RunStatus::Completed,
        start_dist_sq: problem.dist_sq_to_star(&x),
        start_gap: problem.gap_unchecked(&x),
    };
    let mut counter = OracleCounter::new();
    for t in 1..=opts.horizon {
        let n = policy.batch(t)?;
        if counter.calls().checked_add(n).is_none_or(|c| c > opts.budget) {
            traj.status = RunStatus::BudgetExhausted;
            break;
        }
        let batch = minibatch_gradient(model, problem, &x, n, &stream.child(t as u32), &mut counter)?;
        let eps = vector::sub(&batch.grad, &problem.gradient_unchecked(&x));
        let (delta_a, delta_m) = ledger_terms(&eps, &x, &problem.x_star, alpha, 1.0, problem.l)?;
        let x_next = prox_step(&problem.regularizer, &problem.constraint, &x, &batch.grad, alpha)?;
        let Some(gap) = finite_gap(problem, &x_next) else {
            traj.status = RunStatus::NumericalFailure;
            break;
        };
        traj.records.push(IterationRecord {
            t,
            batch: n,
            cum_calls: counter.calls(),
            iterate: keep.then(|| x_next.clone()),
            dist_sq: problem.dist_sq_to_star(&x_next),
            gap,
            s_dist_sq: None,
            delta_a,
            delta_m,
            alpha,
            beta: None,
        });
        x = x_next;
    }
    Ok(traj)
}

/// Exact-gradient FISTA with constant stepsize and the given weights
/// `beta_1, beta_2, ...`; returns `z^1..z^horizon`.
pub fn deterministic_fista(
    problem: &ProblemInstance,
    alpha: f64,
    betas: &[f64],
    init: &[f64],
    horizon: usize,
) -> Result<Vec<Vec<f64>>> {
    if betas.len() < horizon + 1 {
        return Err(Error::param("betas", format!("need {} weights, got {}", horizon + 1, betas.len())));
    }
    let mut out = Vec::with_capacity(horizon);
    let mut z_prev = init.to_vec();
    let mut y = init.to_vec();
    for t in 0..horizon {
        let g = problem.true_gradient(&y)?;
        let z = prox_step(&problem.regularizer, &problem.constraint, &y, &g, alpha)?;
        let coef = (betas[t] - 1.0) / betas[t + 1];
        y = (0..z.len()).map(|i| coef * (z[i] - z_prev[i]) + z[i]).collect();
        z_prev = z.clone();
        out.push(z);
    }
    Ok(out)
}

/// Exact-gradient proximal gradient; returns `x^2..x^{horizon+1}`.
pub fn deterministic_prox_gradient(problem: &ProblemInstance, alpha: f64, init: &[f64], horizon: usize) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(horizon);
    let mut x = init.to_vec();
    for _ in 0..horizon {
        let g = problem.true_gradient(&x)?;
        x = prox_step(&problem.regularizer, &problem.constraint, &x, &g, alpha)?;
        out.push(x.clone());
    }
    Ok(out)
}
