//! Named verification suites. Each check reruns a self-contained experiment
//! or property sweep and reports the measured values next to its threshold.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, Policy};
use crate::harness::experiment::{complexity_curve, run_built, theorem1_audit, theorem2_audit, ExperimentResult};
use crate::harness::fit;
use crate::numeric::rng::{purpose, RngStream, StreamRng};
use crate::numeric::vector;
use crate::oracle::{self, BatchSampling, OracleCounter, OracleModel};
use crate::problems::{make_random_quadratic, ProblemInstance, QuadraticSpec, SpectrumSpec};
use crate::prox::{self, ConstraintSpec, RegularizerSpec};
use crate::schedules::{self, BetaVariant, SmoothPolicy, StrongPolicy};
use crate::solvers::{self, IterateRecording, RunOptions};

pub const DEFAULT_SEED: u64 = 1;
pub const SUITES: [&str; 6] = ["prox", "oracle", "schedules", "theorem1", "theorem2", "complexity"];

pub const SMOOTH_RATE_CONFIG: &str = include_str!("../../configs/smooth_rate.conf");
pub const SMOOTH_UNBOUNDED_CONFIG: &str = include_str!("../../configs/smooth_unbounded.conf");
pub const MARTINGALE_CONFIG: &str = include_str!("../../configs/martingale.conf");
pub const STRONG_RATE_CONFIG: &str = include_str!("../../configs/strong_rate.conf");
pub const STRONG_COMPLEXITY_CONFIG: &str = include_str!("../../configs/strong_complexity.conf");
pub const SMOOTH_COMPLEXITY_CONFIG: &str = include_str!("../../configs/smooth_complexity.conf");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Criterion {
    AcceleratedRate,
    AcceleratedBound,
    UnboundedVariance,
    LinearRate,
    StrongComplexity,
    SmoothComplexity,
    VarianceDecay,
    Martingale,
    ProxProperties,
    DeterministicReduction,
    ScheduleCertificates,
}

impl Criterion {
    pub const ALL: [Criterion; 11] = [
        Criterion::AcceleratedRate,
        Criterion::AcceleratedBound,
        Criterion::UnboundedVariance,
        Criterion::LinearRate,
        Criterion::StrongComplexity,
        Criterion::SmoothComplexity,
        Criterion::VarianceDecay,
        Criterion::Martingale,
        Criterion::ProxProperties,
        Criterion::DeterministicReduction,
        Criterion::ScheduleCertificates,
    ];

    pub fn number(self) -> usize {
        Self::ALL.iter().position(|c| *c == self).unwrap_or(0) + 1
    }

    pub fn title(self) -> &'static str {
        match self {
            Criterion::AcceleratedRate => "accelerated gap decays like t^-2",
            Criterion::AcceleratedBound => "accelerated gap stays under twice its bound",
            Criterion::UnboundedVariance => "accelerated method converges with unbounded variance",
            Criterion::LinearRate => "prox-gradient distance contracts geometrically",
            Criterion::StrongComplexity => "strongly convex oracle complexity ~ 1/eps",
            Criterion::SmoothComplexity => "smooth oracle complexity ~ 1/eps^2",
            Criterion::VarianceDecay => "mini-batch error decays like 1/sqrt(N)",
            Criterion::Martingale => "noise-ledger increments are centered",
            Criterion::ProxProperties => "prox three-point inequality and grid oracle",
            Criterion::DeterministicReduction => "zero-noise runs match deterministic methods",
            Criterion::ScheduleCertificates => "schedule threshold certificates",
        }
    }

    pub fn suite(self) -> &'static str {
        match self {
            Criterion::ProxProperties => "prox",
            Criterion::VarianceDecay => "oracle",
            Criterion::ScheduleCertificates => "schedules",
            Criterion::AcceleratedRate
            | Criterion::AcceleratedBound
            | Criterion::UnboundedVariance
            | Criterion::Martingale
            | Criterion::DeterministicReduction => "theorem1",
            Criterion::LinearRate => "theorem2",
            Criterion::StrongComplexity | Criterion::SmoothComplexity => "complexity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub criterion: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {:>2} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.criterion, self.name, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn verify(suite: &str, seed: u64) -> Result<Report> {
    if !SUITES.contains(&suite) {
        return Err(Error::UnknownSuite { name: suite.to_string(), valid: SUITES.join(", ") });
    }
    let checks = Criterion::ALL
        .iter()
        .filter(|c| c.suite() == suite)
        .map(|c| check(*c, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report { suite: suite.to_string(), seed, checks })
}

pub fn check(criterion: Criterion, seed: u64) -> Result<Check> {
    let (passed, detail) = match criterion {
        Criterion::AcceleratedRate => accelerated_rate(seed)?,
        Criterion::AcceleratedBound => accelerated_bound(seed)?,
        Criterion::UnboundedVariance => unbounded_variance(seed)?,
        Criterion::LinearRate => linear_rate(seed)?,
        Criterion::StrongComplexity => strong_complexity(seed)?,
        Criterion::SmoothComplexity => smooth_complexity(seed)?,
        Criterion::VarianceDecay => variance_decay(seed)?,
        Criterion::Martingale => martingale(seed)?,
        Criterion::ProxProperties => prox_properties(seed)?,
        Criterion::DeterministicReduction => deterministic_reduction()?,
        Criterion::ScheduleCertificates => schedule_certificates(seed)?,
    };
    Ok(Check { criterion: criterion.number(), name: criterion.title().to_string(), passed, detail })
}

/// Parses a shipped configuration with the replication seed replaced.
pub fn shipped_config(text: &str, seed: u64) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::parse(text)?;
    cfg.override_seed(seed);
    cfg.jobs = Some(1);
    Ok(cfg)
}

fn run_shipped(text: &str, seed: u64) -> Result<(ExperimentConfig, ProblemInstance, Policy, ExperimentResult)> {
    let cfg = shipped_config(text, seed)?;
    let (problem, policy) = cfg.build()?;
    let result = run_built(&cfg, &problem, &policy)?;
    Ok((cfg, problem, policy, result))
}

fn accelerated_rate(seed: u64) -> Result<(bool, String)> {
    let (_, _, _, result) = run_shipped(SMOOTH_RATE_CONFIG, seed)?;
    let fit = fit::fit_power_rate(&result.t_values(), &result.gap_means(), (30.0, 300.0))?;
    let ok = (-2.4..=-1.6).contains(&fit.rate);
    Ok((ok, format!("slope {:.4} (r^2 {:.4}) over t in [30, 300], need [-2.4, -1.6]", fit.rate, fit.r_squared)))
}

fn accelerated_bound(seed: u64) -> Result<(bool, String)> {
    let (_, problem, policy, result) = run_shipped(SMOOTH_RATE_CONFIG, seed)?;
    let Policy::Smooth(policy) = policy else { unreachable!("accelerated config") };
    let audit = theorem1_audit(&result, &problem, &policy)?;
    let worst = audit.iter().map(|(t, g, b)| (*t, g / b)).fold((0, 0.0f64), |a, x| if x.1 > a.1 { x } else { a });
    let ok = worst.1 <= 2.0 && audit.len() >= 299;
    Ok((
        ok,
        format!(
            "max gap/bound {:.3e} at t = {} over {} iterations (t0 = {}, J = {:.4}), need <= 2",
            worst.1,
            worst.0,
            audit.len(),
            result.bounds.t0,
            result.bounds.j.unwrap_or(f64::NAN)
        ),
    ))
}

fn unbounded_variance(seed: u64) -> Result<(bool, String)> {
    let (_, problem, _, result) = run_shipped(SMOOTH_UNBOUNDED_CONFIG, seed)?;
    let g10 = result.row(10).map_or(f64::NAN, |r| r.gap_mean);
    let g200 = result.row(200).map_or(f64::NAN, |r| r.gap_mean);
    let ratio = g200 / g10;
    let ok = ratio <= 1.0 / 50.0 && result.failures == 0 && problem.noise_matrix_eigenvalue() > 0.0;
    Ok((
        ok,
        format!(
            "gap(200)/gap(10) = {ratio:.3e} (need <= 2e-2), failures {}/{}, lambda_min(B) = {:.3}",
            result.failures,
            result.replications,
            problem.noise_matrix_eigenvalue()
        ),
    ))
}

fn linear_rate(seed: u64) -> Result<(bool, String)> {
    let (_, _, policy, result) = run_shipped(STRONG_RATE_CONFIG, seed)?;
    let Policy::Strong(policy) = policy else { unreachable!("prox-gradient config") };
    let audit = theorem2_audit(&result)?;
    let worst = audit.iter().map(|(_, d, b)| d / b).fold(0.0f64, f64::max);
    let fit = fit::fit_geometric_rate(&result.t_values(), &result.dist_sq_means(), fit::default_window(result.rows.len() as u64))?;
    let rho = policy.rho();
    let ok = worst <= 1.0 && audit.len() == 100 && fit.rate <= rho + 0.02;
    Ok((
        ok,
        format!(
            "max dist/bound {worst:.3e} (C = {:.4}, rho = {rho:.5}, t0 = {}), fitted ratio {:.5} vs rho + 0.02",
            result.bounds.c.unwrap_or(f64::NAN),
            result.bounds.t0,
            fit.rate
        ),
    ))
}

const STRONG_EPS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
const SMOOTH_EPS: [f64; 3] = [1e-1, 1e-2, 1e-3];

fn describe_curve(rows: &[fit::ComplexityRow]) -> String {
    rows.iter()
        .map(|r| match (r.t_hit, r.cum_calls) {
            (Some(t), Some(c)) => format!("{:.0e}: T={t}, calls={c}", r.eps),
            _ => format!("{:.0e}: unreached", r.eps),
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn strong_complexity(seed: u64) -> Result<(bool, String)> {
    let (_, _, _, result) = run_shipped(STRONG_COMPLEXITY_CONFIG, seed)?;
    let rows = complexity_curve(&result, &STRONG_EPS);
    let reached = rows.iter().all(|r| r.t_hit.is_some());
    let slope = fit::complexity_slope(&rows).unwrap_or(f64::NAN);
    let ok = reached && (0.8..=1.2).contains(&slope);
    Ok((ok, format!("slope {slope:.4} (need [0.8, 1.2]); {}", describe_curve(&rows))))
}

fn smooth_complexity(seed: u64) -> Result<(bool, String)> {
    let (_, _, policy, result) = run_shipped(SMOOTH_COMPLEXITY_CONFIG, seed)?;
    let Policy::Smooth(policy) = policy else { unreachable!("accelerated config") };
    let rows = complexity_curve(&result, &SMOOTH_EPS);
    let reached = rows.iter().all(|r| r.t_hit.is_some());
    let slope = fit::complexity_slope(&rows).unwrap_or(f64::NAN);
    let mut growth = Vec::new();
    for t in [100u64, 1_000, 10_000] {
        let total = policy.cumulative_calls(t)? as f64;
        let tf = t as f64;
        growth.push(total / (tf.powi(4) * tf.ln().powi(2)));
    }
    let growth_ok = growth.iter().all(|g| (0.1..=10.0).contains(g));
    let ok = reached && (1.6..=2.4).contains(&slope) && growth_ok;
    Ok((
        ok,
        format!(
            "slope {slope:.4} (need [1.6, 2.4]); {}; sum N / (T^4 ln^2 T) = {:.4}, {:.4}, {:.4} (need [0.1, 10])",
            describe_curve(&rows),
            growth[0],
            growth[1],
            growth[2]
        ),
    ))
}

/// Root-mean-square mini-batch error at `x` over `m` independent batches of size `n`.
pub fn minibatch_rms_error(model: &OracleModel, problem: &ProblemInstance, x: &[f64], n: u64, m: u64, stream: &RngStream) -> Result<f64> {
    let g = problem.true_gradient(x)?;
    let mut counter = OracleCounter::new();
    let mut acc = crate::numeric::NeumaierSum::new();
    for k in 0..m {
        let b = oracle::minibatch_gradient(model, problem, x, n, &stream.child(k as u32), &mut counter)?;
        acc.add(vector::dist_sq(&b.grad, &g));
    }
    Ok((acc.value() / m as f64).sqrt())
}

fn variance_decay(seed: u64) -> Result<(bool, String)> {
    let model = OracleModel::random_matrix(0.3, 0.2).with_sampling(BatchSampling::Explicit);
    let mut spec = QuadraticSpec::new(4, SpectrumSpec::Conditioned { c: 0.2, l: 1.0 }, model.clone());
    spec.seed = 21;
    let problem = make_random_quadratic(&spec)?;
    let root = RngStream::new(seed).child(purpose::VERIFY).child(7);
    let mut dir = vec![0.0; problem.dim];
    crate::numeric::rng::fill_standard_normal(&mut root.child(999).rng(), &mut dir);
    let unit = vector::scale(&dir, 1.0 / vector::norm(&dir));
    let points: Vec<Vec<f64>> = [0.0, 1.0, 3.0]
        .iter()
        .map(|r| vector::add(&problem.x_star, &vector::scale(&unit, *r)))
        .collect();
    let sizes = [1u64, 4, 16, 64, 256];
    let m = 10_000;
    let mut ok = true;
    let mut worst_bound = 0.0f64;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (pi, x) in points.iter().enumerate() {
        let dist = vector::dist_sq(x, &problem.x_star).sqrt();
        let mut errs = Vec::new();
        for (ni, &n) in sizes.iter().enumerate() {
            let e = minibatch_rms_error(&model, &problem, x, n, m, &root.child(pi as u32).child(ni as u32))?;
            let bound = oracle::variance_decay_bound(problem.sigma_star, problem.sigma_l, dist, n)?;
            worst_bound = worst_bound.max(e / bound);
            errs.push(e);
        }
        for w in errs.windows(2) {
            let r = w[0] / w[1];
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    ok &= worst_bound <= 1.05 && lo >= 1.7 && hi <= 2.3;
    Ok((ok, format!("max error/bound {worst_bound:.4} (need <= 1.05); error(N)/error(4N) in [{lo:.4}, {hi:.4}] (need [1.7, 2.3])")))
}

fn martingale(seed: u64) -> Result<(bool, String)> {
    let (_, _, _, result) = run_shipped(MARTINGALE_CONFIG, seed)?;
    let total = result.rows.len();
    let pass = result.rows.iter().filter(|r| r.dm_se == 0.0 && r.dm_mean == 0.0 || r.dm_mean.abs() <= 3.5 * r.dm_se).count();
    let frac = pass as f64 / total as f64;
    Ok((frac >= 0.95 && result.replications >= 200, format!("{pass}/{total} iterations within 3.5 SE ({:.1}%, need >= 95%) over {} replications", 100.0 * frac, result.replications)))
}

fn random_reg(rng: &mut StreamRng) -> RegularizerSpec {
    let w = |rng: &mut StreamRng| rng.random_range(0.0..2.0);
    match rng.random_range(0..4) {
        0 => RegularizerSpec::Zero,
        1 => RegularizerSpec::L1 { lambda: w(rng) },
        2 => RegularizerSpec::SquaredL2 { lambda: w(rng) },
        _ => RegularizerSpec::ElasticNet { lambda: w(rng), gamma: w(rng) },
    }
}

fn random_vec(rng: &mut StreamRng, d: usize, r: f64) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(-r..r)).collect()
}

/// Counts violations of the three-point inequality over `cases` random instances.
pub fn three_point_violations(cases: u64, stream: &RngStream) -> Result<(u64, f64)> {
    let mut rng = stream.rng();
    let mut bad = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..cases {
        let d = rng.random_range(1..=5);
        let cons = match rng.random_range(0..3) {
            0 => ConstraintSpec::AllSpace,
            1 => {
                let lo = random_vec(&mut rng, d, 2.0);
                let hi = lo.iter().map(|l| l + rng.random_range(0.0..2.0)).collect();
                ConstraintSpec::Box { lo, hi }
            }
            _ => ConstraintSpec::Ball { center: random_vec(&mut rng, d, 1.0), radius: rng.random_range(0.1..2.0) },
        };
        let reg = if matches!(cons, ConstraintSpec::Ball { .. }) { RegularizerSpec::Zero } else { random_reg(&mut rng) };
        let y = random_vec(&mut rng, d, 3.0);
        let u = random_vec(&mut rng, d, 3.0);
        let alpha = rng.random_range(0.05..2.0);
        let x = cons.project(&random_vec(&mut rng, d, 3.0));
        let z = prox::prox_step(&reg, &cons, &y, &u, alpha)?;
        let p = |v: &[f64]| vector::dot(&u, &vector::sub(v, &y)) + prox::reg_value(&reg, v);
        let k = 0.5 / alpha;
        let lhs = p(&z) + k * vector::dist_sq(&z, &y);
        let rhs = p(&x) + k * vector::dist_sq(&x, &y) - k * vector::dist_sq(&x, &z);
        worst = worst.max(lhs - rhs);
        if lhs > rhs + 1e-9 {
            bad += 1;
        }
    }
    Ok((bad, worst))
}

/// Largest distance between the scalar prox and a brute-force minimizer on a
/// grid of spacing 1e-6, over `trials` draws per regularizer kind.
pub fn grid_oracle_error(trials: u32, stream: &RngStream) -> Result<f64> {
    let mut rng = stream.rng();
    let step = 1e-6;
    let mut worst = 0.0f64;
    for kind in 0..4 {
        for _ in 0..trials {
            let w = |rng: &mut StreamRng| rng.random_range(0.0..0.4);
            let reg = match kind {
                0 => RegularizerSpec::Zero,
                1 => RegularizerSpec::L1 { lambda: w(&mut rng) },
                2 => RegularizerSpec::SquaredL2 { lambda: w(&mut rng) },
                _ => RegularizerSpec::ElasticNet { lambda: w(&mut rng), gamma: w(&mut rng) },
            };
            let y = rng.random_range(-2.0..2.0);
            let u = rng.random_range(-2.0..2.0);
            let alpha = rng.random_range(0.2..1.0);
            let z = prox::prox_step(&reg, &ConstraintSpec::AllSpace, &[y], &[u], alpha)?[0];
            let h = |x: f64| u * (x - y) + (x - y) * (x - y) / (2.0 * alpha) + prox::reg_value(&reg, &[x]);
            let lo = (z * 4.0).round() / 4.0 - 0.5;
            let (mut best_x, mut best) = (lo, f64::INFINITY);
            for i in 0..=1_000_000u32 {
                let x = lo + f64::from(i) * step;
                let v = h(x);
                if v < best {
                    best = v;
                    best_x = x;
                }
            }
            worst = worst.max((best_x - z).abs());
        }
    }
    Ok(worst)
}

fn prox_properties(seed: u64) -> Result<(bool, String)> {
    let root = RngStream::new(seed).child(purpose::VERIFY).child(9);
    let (bad, worst) = three_point_violations(1_000_000, &root.child(0))?;
    let grid = grid_oracle_error(5, &root.child(1))?;
    let ok = bad == 0 && grid <= 1e-6 + 1e-12;
    Ok((ok, format!("three-point violations {bad}/1000000 (max slack {worst:.2e}); grid oracle max deviation {grid:.2e} (resolution 1e-6)")))
}

fn deterministic_reduction() -> Result<(bool, String)> {
    let zero = OracleModel::noiseless();
    let mut spec = QuadraticSpec::new(20, SpectrumSpec::RankDeficient { l: 1.0, floor: 1e-4 }, zero.clone());
    spec.rotate = true;
    spec.seed = 31;
    spec.regularizer = RegularizerSpec::ElasticNet { lambda: 0.01, gamma: 0.01 };
    let problem = make_random_quadratic(&spec)?;
    let policy = SmoothPolicy::new(0.5, problem.l, 0.5, 44.0, 2, problem.l, BetaVariant::Linear)?;
    let horizon = 200;
    let opts = RunOptions::new(horizon).record(IterateRecording::Always);
    let run = solvers::run_accelerated(&problem, &zero, &policy, &opts, &RngStream::new(0))?;
    let betas: Vec<f64> = policy.betas().take(horizon as usize + 1).collect();
    let init = problem.constraint.project(&vec![0.0; problem.dim]);
    let reference = solvers::deterministic_fista(&problem, policy.alpha(), &betas, &init, horizon as usize)?;
    let identical = run.records.len() == reference.len()
        && run.records.iter().zip(&reference).all(|(r, z)| {
            r.iterate.as_deref() == Some(z.as_slice()) && r.gap.to_bits() == problem.gap_unchecked(z).to_bits()
        });

    let diag = ProblemInstance::diagonal(
        vec![0.1, 0.3, 0.6, 1.0],
        vec![0.1, -0.3, 0.3, -0.5],
        RegularizerSpec::Zero,
        ConstraintSpec::AllSpace,
        zero.clone(),
    )?;
    let strong = StrongPolicy::new(0.5, 0.9, 1, 0.01, diag.l, diag.c)?;
    let mut init = diag.x_star.clone();
    init[0] += 1.0;
    let run = solvers::run_prox_gradient(&diag, &zero, &strong, &RunOptions::new(100).init(init.clone()), &RngStream::new(0))?;
    let factor = 1.0 - strong.mu * diag.c / diag.l;
    let mut prev = vector::dist_sq(&init, &diag.x_star).sqrt();
    let mut worst = 0.0f64;
    for r in &run.records {
        let cur = r.dist_sq.sqrt();
        worst = worst.max(((cur / prev) / factor - 1.0).abs());
        prev = cur;
    }
    let ok = identical && worst <= 1e-12;
    Ok((ok, format!("accelerated bitwise match over {horizon} iterations: {identical}; prox-gradient contraction max relative error {worst:.2e} (factor {factor})")))
}

fn schedule_certificates(seed: u64) -> Result<(bool, String)> {
    let mut rng = RngStream::new(seed).child(purpose::VERIFY).child(11).rng();
    let horizon = 1_000_000;
    let (mut smooth_fail, mut verbatim_fail, mut smooth_n) = (0, 0, 0);
    while smooth_n < 100 {
        let l = 10f64.powf(rng.random_range(-1.0..1.0));
        let mu = rng.random_range(0.05..0.95);
        let a = l * 10f64.powf(rng.random_range(-1.0..1.0));
        let b = rng.random_range(0.25..2.0);
        let delta = rng.random_range(0.0..50.0);
        let n0 = rng.random_range(1..=16u64);
        let phi = rng.random_range(0.05..0.95);
        let sigma_l = l * rng.random_range(0.0..5.0);
        let policy = SmoothPolicy::new(mu, a, b, delta, n0, l, BetaVariant::Linear)?;
        let Ok(t0) = policy.t0(sigma_l, phi) else { continue };
        if t0 > horizon / 10 {
            continue;
        }
        smooth_n += 1;
        let cap = phi / (15.0 * sigma_l * sigma_l);
        if policy.tail_sum(t0, horizon) > cap {
            smooth_fail += 1;
        }
        let verbatim = schedules::t0_smooth(phi, n0, b, delta, policy.alpha() * sigma_l)?;
        if policy.tail_sum(verbatim, horizon) > cap {
            verbatim_fail += 1;
        }
    }
    let mut strong_fail = 0;
    for _ in 0..100 {
        let l = 10f64.powf(rng.random_range(-1.0..1.0));
        let c = l * rng.random_range(0.01..1.0);
        let mu = rng.random_range(0.05..0.95);
        let half = mu * c / (2.0 * l);
        let phi = half * rng.random_range(0.01..0.99);
        let zeta = rng.random_range(0.05..0.999);
        let n0 = rng.random_range(1..=16u64);
        let sigma_l = l * rng.random_range(0.0..5.0);
        let p = StrongPolicy::new(mu, zeta, n0, phi, l, c)?;
        let t0 = p.t0(sigma_l)?;
        let d = p.delta_aux(sigma_l) * zeta.powf(t0 as f64);
        if d > phi * (1.0 + 1e-12) || p.lambda() + d >= p.rho() {
            strong_fail += 1;
        }
    }
    let residual_ok = schedules::beta_recursion_residuals(BetaVariant::Linear, 100_000).iter().all(|r| *r == -0.25);
    let clamp = schedules::t0_smooth(0.5, 2, 0.5, 44.0, 1.0)?;
    let ok = smooth_fail == 0 && strong_fail == 0 && residual_ok && clamp == 1;
    Ok((
        ok,
        format!(
            "smooth tail certificate failures {smooth_fail}/100 (unadjusted argument: {verbatim_fail}/100); strong failures {strong_fail}/100; linear residual -1/4 up to 1e5: {residual_ok}; delta = 44 gives t0 = {clamp}"
        ),
    ))
}
