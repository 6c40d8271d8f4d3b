//! Replicated runs, per-iteration aggregation and bound evaluation.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::config::{Algorithm, ExperimentConfig, Policy};
use crate::harness::fit::{self, ComplexityRow, RateFit};
use crate::numeric::{MomentAccumulator, RngStream};
use crate::problems::ProblemInstance;
use crate::schedules::{self, BoundReport, Prop2Inputs, SmoothPolicy, StrongPolicy, Theorem1Inputs, Theorem2Inputs};
use crate::solvers::{run_accelerated, run_prox_gradient, RunOptions, RunStatus, Trajectory};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub t: u64,
    pub rep_count: u64,
    pub n_t: u64,
    pub cum_calls: u64,
    pub gap_mean: f64,
    pub gap_se: f64,
    pub dist_sq_mean: f64,
    pub dist_sq_se: f64,
    pub s_dist_sq_mean: Option<f64>,
    pub dm_mean: f64,
    pub dm_se: f64,
    pub da_mean: f64,
    pub alpha_t: f64,
    pub beta_t: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FittedRates {
    pub window: (f64, f64),
    /// Log-log slope of the mean gap.
    pub gap_power: Option<RateFit>,
    /// Per-step ratio of the mean squared distance.
    pub dist_sq_geometric: Option<RateFit>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub name: String,
    pub algorithm: Algorithm,
    pub config_echo: BTreeMap<String, String>,
    pub seed: u64,
    pub replications: u32,
    pub failures: u32,
    pub budget_stops: u32,
    pub start_gap: f64,
    pub start_dist_sq: f64,
    pub rows: Vec<AggregateRow>,
    pub rates: FittedRates,
    pub bounds: BoundReport,
    pub trajectories: Vec<Trajectory>,
}

impl ExperimentResult {
    pub fn t_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t as f64).collect()
    }

    pub fn gap_means(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.gap_mean).collect()
    }

    pub fn dist_sq_means(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.dist_sq_mean).collect()
    }

    pub fn row(&self, t: u64) -> Option<&AggregateRow> {
        self.rows.iter().find(|r| r.t == t)
    }
}

/// First iteration whose mean gap reaches each tolerance, with the oracle calls spent.
pub fn complexity_curve(result: &ExperimentResult, eps_grid: &[f64]) -> Vec<ComplexityRow> {
    let t: Vec<u64> = result.rows.iter().map(|r| r.t).collect();
    let calls: Vec<u64> = result.rows.iter().map(|r| r.cum_calls).collect();
    fit::complexity_points(&t, &result.gap_means(), &calls, eps_grid)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let (problem, policy) = config.build()?;
    run_built(config, &problem, &policy)
}

/// Runs `config.reps` replications of an already-built problem and policy.
pub fn run_built(config: &ExperimentConfig, problem: &ProblemInstance, policy: &Policy) -> Result<ExperimentResult> {
    let opts = RunOptions::new(config.horizon).budget(config.budget).record(config.record);
    let root = RngStream::new(config.seed);
    let one = |rep: u32| -> Result<Trajectory> {
        let stream = root.child(rep);
        match policy {
            Policy::Smooth(p) => run_accelerated(problem, &problem.oracle, p, &opts, &stream),
            Policy::Strong(p) => run_prox_gradient(problem, &problem.oracle, p, &opts, &stream),
        }
    };
    let jobs = config.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let trajectories: Vec<Trajectory> = if jobs <= 1 {
        (0..config.reps).map(one).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Validation(format!("cannot start worker pool: {e}")))?;
        pool.install(|| (0..config.reps).into_par_iter().map(one).collect::<Result<_>>())?
    };
    let mut result = aggregate(config, trajectories)?;
    result.bounds = match policy {
        Policy::Smooth(p) => smooth_bounds(&result, problem, p, config.smooth.phi)?,
        Policy::Strong(p) => strong_bounds(&result, problem, p)?,
    };
    Ok(result)
}

fn aggregate(config: &ExperimentConfig, trajectories: Vec<Trajectory>) -> Result<ExperimentResult> {
    let failures = trajectories.iter().filter(|t| t.status == RunStatus::NumericalFailure).count() as u32;
    let budget_stops = trajectories.iter().filter(|t| t.status == RunStatus::BudgetExhausted).count() as u32;
    let ok: Vec<&Trajectory> = trajectories.iter().filter(|t| t.status != RunStatus::NumericalFailure).collect();
    if ok.is_empty() {
        return Err(Error::AllFailed);
    }
    let len = ok.iter().map(|t| t.records.len()).max().unwrap_or(0);
    let mut rows = Vec::with_capacity(len);
    for i in 0..len {
        let mut gap = MomentAccumulator::new();
        let mut dist = MomentAccumulator::new();
        let mut sdist = MomentAccumulator::new();
        let mut dm = MomentAccumulator::new();
        let mut da = MomentAccumulator::new();
        let mut first = None;
        for tr in &ok {
            if let Some(r) = tr.records.get(i) {
                first.get_or_insert(r);
                gap.push(r.gap);
                dist.push(r.dist_sq);
                if let Some(s) = r.s_dist_sq {
                    sdist.push(s);
                }
                dm.push(r.delta_m);
                da.push(r.delta_a);
            }
        }
        let r = first.expect("at least one record at this index");
        rows.push(AggregateRow {
            t: r.t,
            rep_count: gap.count(),
            n_t: r.batch,
            cum_calls: r.cum_calls,
            gap_mean: gap.mean(),
            gap_se: gap.std_error(),
            dist_sq_mean: dist.mean(),
            dist_sq_se: dist.std_error(),
            s_dist_sq_mean: (sdist.count() > 0).then(|| sdist.mean()),
            dm_mean: dm.mean(),
            dm_se: dm.std_error(),
            da_mean: da.mean(),
            alpha_t: r.alpha,
            beta_t: r.beta,
        });
    }
    let mut start_gap = MomentAccumulator::new();
    let mut start_dist = MomentAccumulator::new();
    for tr in &ok {
        start_gap.push(tr.start_gap);
        start_dist.push(tr.start_dist_sq);
    }
    let window = fit::default_window(rows.len() as u64);
    let t: Vec<f64> = rows.iter().map(|r| r.t as f64).collect();
    let gaps: Vec<f64> = rows.iter().map(|r| r.gap_mean).collect();
    let dists: Vec<f64> = rows.iter().map(|r| r.dist_sq_mean).collect();
    let rates = FittedRates {
        window,
        gap_power: fit::fit_power_rate(&t, &gaps, window).ok(),
        dist_sq_geometric: (config.algorithm == Algorithm::ProxGradient)
            .then(|| fit::fit_geometric_rate(&t, &dists, window).ok())
            .flatten(),
    };
    Ok(ExperimentResult {
        name: config.name.clone(),
        algorithm: config.algorithm,
        config_echo: config.echo(),
        seed: config.seed,
        replications: config.reps,
        failures,
        budget_stops,
        start_gap: start_gap.mean(),
        start_dist_sq: start_dist.mean(),
        rows,
        rates,
        bounds: BoundReport::default(),
        trajectories,
    })
}

/// Tail mass `gamma` paired with the threshold iteration of a smooth run.
pub fn smooth_gamma(problem: &ProblemInstance, policy: &SmoothPolicy, phi: f64, t0: u64) -> f64 {
    if problem.sigma_l > 0.0 {
        phi / (15.0 * problem.sigma_l * problem.sigma_l)
    } else {
        policy.tail_sum(t0, 100_000)
    }
}

/// Threshold iteration, tail mass and distance bound `J` from the measured
/// prefix of an accelerated run.
pub fn smooth_bounds(result: &ExperimentResult, problem: &ProblemInstance, policy: &SmoothPolicy, phi: f64) -> Result<BoundReport> {
    let t0 = policy.t0(problem.sigma_l, phi)?;
    let gamma = smooth_gamma(problem, policy, phi, t0);
    let j = match result.row(t0) {
        Some(row) => Some(schedules::prop2_bound(&Prop2Inputs {
            alpha_t0: policy.alpha(),
            beta_t0: policy.beta(t0)?,
            gaps_upto_t0: result.rows.iter().take_while(|r| r.t <= t0).map(|r| r.gap_mean.max(0.0)).collect(),
            s_t0_dist_sq: row.s_dist_sq_mean.unwrap_or(row.dist_sq_mean),
            sigma_star: problem.sigma_star,
            sigma_l: problem.sigma_l,
            gamma,
        })?),
        None => None,
    };
    Ok(BoundReport { t0, j, gamma: Some(gamma), ..Default::default() })
}

/// `(t, observed mean gap of z^t, bound on it)` for every `t >= 2`.
pub fn theorem1_audit(result: &ExperimentResult, problem: &ProblemInstance, policy: &SmoothPolicy) -> Result<Vec<(u64, f64, f64)>> {
    let first = result.row(1).ok_or(Error::EmptyInput("no recorded iterations"))?;
    let j = result.bounds.j.ok_or_else(|| Error::param("J", "distance bound unavailable (run shorter than t0)"))?;
    let inputs = Theorem1Inputs {
        gap1: first.gap_mean.max(0.0),
        s1_dist_sq: first.s_dist_sq_mean.unwrap_or(first.dist_sq_mean),
        sigma_star: problem.sigma_star,
        sigma_l: problem.sigma_l,
        j,
        mu: policy.mu,
        a: policy.a,
        b: policy.b,
        delta: policy.delta,
        n0: policy.n0,
        l: policy.l,
    };
    result
        .rows
        .iter()
        .filter(|r| r.t >= 2)
        .map(|r| Ok((r.t, r.gap_mean, schedules::theorem1_bound(r.t - 1, &inputs)?)))
        .collect()
}

/// `E|x^tau - x*|^2` for `tau >= 1`, where `x^1` is the starting point.
fn strong_dist(result: &ExperimentResult, tau: u64) -> Option<f64> {
    if tau == 1 {
        Some(result.start_dist_sq)
    } else {
        result.row(tau - 1).map(|r| r.dist_sq_mean)
    }
}

pub fn strong_bounds(result: &ExperimentResult, problem: &ProblemInstance, policy: &StrongPolicy) -> Result<BoundReport> {
    let t0 = policy.t0(problem.sigma_l)?;
    let mut report = BoundReport { t0, rho: Some(policy.rho()), ..Default::default() };
    let Some(at_t0) = strong_dist(result, t0) else {
        return Ok(report);
    };
    let maxpre = (1..t0).filter_map(|tau| strong_dist(result, tau)).fold(0.0, f64::max);
    let consts = schedules::theorem2_constants(&Theorem2Inputs {
        x1_dist_sq: result.start_dist_sq,
        max_dist_sq_before_t0: maxpre,
        dist_sq_at_t0: at_t0,
        mu: policy.mu,
        c: policy.c,
        l: policy.l,
        n0: policy.n0,
        sigma_star: problem.sigma_star,
        sigma_l: problem.sigma_l,
        phi: policy.phi,
        t0,
    })?;
    report.c = consts.c;
    report.c0 = consts.c0;
    report.c1 = consts.c1;
    report.q = consts.q;
    Ok(report)
}

/// `(t, observed E|x^{t+1} - x*|^2, C rho^{t+1})` for every recorded `t`.
pub fn theorem2_audit(result: &ExperimentResult) -> Result<Vec<(u64, f64, f64)>> {
    let c = result.bounds.c.ok_or_else(|| Error::param("C", "constant unavailable"))?;
    let rho = result.bounds.rho.ok_or_else(|| Error::param("rho", "contraction factor unavailable"))?;
    Ok(result.rows.iter().map(|r| (r.t, r.dist_sq_mean, c * rho.powf(r.t as f64 + 1.0))).collect())
}
