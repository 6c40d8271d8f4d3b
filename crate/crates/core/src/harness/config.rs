//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! experiment.name = smooth_demo
//! run.algorithm = accelerated
//! problem.dim = 20
//! problem.spectrum = rank_deficient
//! oracle.kind = random_matrix
//! oracle.scale = 0.1
//! policy.mu = 0.5
//! run.horizon = 300
//! run.reps = 50
//! run.seed = 1
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{BatchSampling, OracleModel};
use crate::problems::{make_random_quadratic, ProblemInstance, QuadraticSpec, SpectrumLayout, SpectrumSpec};
use crate::prox::{ConstraintSpec, RegularizerSpec};
use crate::schedules::{admissible_a_frac, BetaVariant, SmoothPolicy, StrongPolicy};
use crate::solvers::IterateRecording;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Accelerated,
    ProxGradient,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Accelerated => "accelerated",
            Algorithm::ProxGradient => "prox_gradient",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothParams {
    pub mu: f64,
    /// Defaults to the problem's `L`.
    pub a: Option<f64>,
    pub b: f64,
    pub delta: f64,
    pub n0: u64,
    pub beta_variant: BetaVariant,
    /// Tail-mass parameter used for the threshold iteration and the distance bound.
    pub phi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ZetaChoice {
    Fixed(f64),
    /// `None` picks (just below) the largest admissible `a_frac`.
    Matched { a_frac: Option<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongParams {
    pub mu: f64,
    pub n0: u64,
    /// Defaults to `mu c / (4L)`, the middle of the admissible range.
    pub phi: Option<f64>,
    pub zeta: ZetaChoice,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Policy {
    Smooth(SmoothPolicy),
    Strong(StrongPolicy),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub algorithm: Algorithm,
    pub problem: QuadraticSpec,
    pub smooth: SmoothParams,
    pub strong: StrongParams,
    pub horizon: u64,
    pub reps: u32,
    pub seed: u64,
    pub budget: u64,
    pub out_dir: Option<PathBuf>,
    pub record: IterateRecording,
    pub jobs: Option<usize>,
    echo: Vec<(String, String)>,
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
    used: std::collections::BTreeSet<String>,
}

impl Entries {
    fn raw(&mut self, key: &str) -> Option<(usize, String)> {
        self.used.insert(key.to_string());
        self.map.get(key).cloned()
    }

    fn get<T: FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some((line, v)) => v.parse().map_err(|_| Error::Config { line, reason: format!("cannot parse `{key} = {v}`") }),
        }
    }

    fn opt<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config { line, reason: format!("cannot parse `{key} = {v}`") }),
        }
    }

    fn choice(&mut self, key: &str, default: &str, allowed: &[&str]) -> Result<String> {
        let (line, v) = self.raw(key).unwrap_or((0, default.to_string()));
        if allowed.contains(&v.as_str()) {
            Ok(v)
        } else {
            Err(Error::Config { line, reason: format!("`{key}` must be one of {}, got `{v}`", allowed.join(", ")) })
        }
    }

    /// Scalar replicated to `d` entries, or a comma-separated list of length `d`.
    fn vector(&mut self, key: &str, default: f64, d: usize) -> Result<Vec<f64>> {
        match self.raw(key) {
            None => Ok(vec![default; d]),
            Some((line, v)) => {
                let parts: std::result::Result<Vec<f64>, _> = v.split(',').map(|p| p.trim().parse::<f64>()).collect();
                let parts = parts.map_err(|_| Error::Config { line, reason: format!("cannot parse `{key} = {v}`") })?;
                match parts.len() {
                    1 => Ok(vec![parts[0]; d]),
                    n if n == d => Ok(parts),
                    n => Err(Error::Config { line, reason: format!("`{key}` has {n} entries, expected 1 or {d}") }),
                }
            }
        }
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut echo = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config { line: i + 1, reason: format!("expected `key = value`, got `{line}`") });
            };
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k.is_empty() {
                return Err(Error::Config { line: i + 1, reason: "empty key".into() });
            }
            if map.insert(k.clone(), (i + 1, v.clone())).is_some() {
                return Err(Error::Config { line: i + 1, reason: format!("duplicate key `{k}`") });
            }
            echo.push((k, v));
        }
        let mut e = Entries { map, used: Default::default() };
        let cfg = Self::from_entries(&mut e, echo)?;
        if let Some((k, (line, _))) = e.map.iter().find(|(k, _)| !e.used.contains(*k)) {
            return Err(Error::Config { line: *line, reason: format!("unknown key `{k}`") });
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    fn from_entries(e: &mut Entries, echo: Vec<(String, String)>) -> Result<Self> {
        let name = e.get("experiment.name", "experiment".to_string())?;
        let algorithm = match e.choice("run.algorithm", "accelerated", &["accelerated", "prox_gradient"])?.as_str() {
            "accelerated" => Algorithm::Accelerated,
            _ => Algorithm::ProxGradient,
        };
        let dim: usize = e.get("problem.dim", 10)?;
        let l: f64 = e.get("problem.l", 1.0)?;
        let spectrum = match e.choice("problem.spectrum", "conditioned", &["conditioned", "rank_deficient"])?.as_str() {
            "conditioned" => SpectrumSpec::Conditioned { c: e.get("problem.c", 0.1)?, l },
            _ => SpectrumSpec::RankDeficient { l, floor: e.get("problem.floor", 1e-6)? },
        };
        let layout = match e.choice("problem.layout", "geometric", &["geometric", "log_uniform"])?.as_str() {
            "geometric" => SpectrumLayout::Geometric,
            _ => SpectrumLayout::LogUniform,
        };
        let regularizer = match e.choice("regularizer.kind", "zero", &["zero", "l1", "squared_l2", "elastic_net"])?.as_str() {
            "zero" => RegularizerSpec::Zero,
            "l1" => RegularizerSpec::L1 { lambda: e.get("regularizer.lambda", 0.0)? },
            "squared_l2" => RegularizerSpec::SquaredL2 { lambda: e.get("regularizer.lambda", 0.0)? },
            _ => RegularizerSpec::ElasticNet { lambda: e.get("regularizer.lambda", 0.0)?, gamma: e.get("regularizer.gamma", 0.0)? },
        };
        let constraint = match e.choice("constraint.kind", "all_space", &["all_space", "box", "ball"])?.as_str() {
            "all_space" => ConstraintSpec::AllSpace,
            "box" => ConstraintSpec::Box { lo: e.vector("constraint.lo", -1.0, dim)?, hi: e.vector("constraint.hi", 1.0, dim)? },
            _ => ConstraintSpec::Ball { center: e.vector("constraint.center", 0.0, dim)?, radius: e.get("constraint.radius", 1.0)? },
        };
        let mut oracle = match e.choice("oracle.kind", "random_matrix", &["additive", "random_matrix"])?.as_str() {
            "additive" => OracleModel::additive(e.get("oracle.sigma", 0.0)?),
            _ => OracleModel::random_matrix(e.get("oracle.scale", 0.0)?, e.get("oracle.vector_scale", 0.0)?),
        };
        oracle.sampling = match e.choice("oracle.sampling", "auto", &["auto", "explicit", "aggregated"])?.as_str() {
            "auto" => BatchSampling::Auto,
            "explicit" => BatchSampling::Explicit,
            _ => BatchSampling::Aggregated,
        };
        let problem = QuadraticSpec {
            dim,
            spectrum,
            layout,
            rotate: e.get("problem.rotate", false)?,
            plant_scale: e.get("problem.plant_scale", 1.0)?,
            regularizer,
            constraint,
            oracle,
            seed: e.get("problem.seed", 0)?,
        };
        let mu = e.get("policy.mu", 0.5)?;
        let n0 = e.get("policy.n0", 1)?;
        let phi: Option<f64> = e.opt("policy.phi")?;
        let smooth = SmoothParams {
            mu,
            a: e.opt("policy.a")?,
            b: e.get("policy.b", 0.5)?,
            delta: e.get("policy.delta", 0.0)?,
            n0,
            beta_variant: match e.choice("policy.beta", "linear", &["linear", "exact"])?.as_str() {
                "linear" => BetaVariant::Linear,
                _ => BetaVariant::Exact,
            },
            phi: phi.unwrap_or(0.5),
        };
        let zeta = match (e.opt::<f64>("policy.zeta")?, e.opt::<f64>("policy.a_frac")?) {
            (Some(_), Some(_)) => return Err(Error::Validation("set at most one of `policy.zeta` and `policy.a_frac`".into())),
            (Some(z), None) => ZetaChoice::Fixed(z),
            (None, a_frac) => ZetaChoice::Matched { a_frac },
        };
        let strong = StrongParams { mu, n0, phi, zeta };
        let cfg = ExperimentConfig {
            name,
            algorithm,
            problem,
            smooth,
            strong,
            horizon: e.get("run.horizon", 100)?,
            reps: e.get("run.reps", 10)?,
            seed: e.get("run.seed", 0)?,
            budget: e.get("run.budget", u64::MAX)?,
            out_dir: e.opt::<String>("run.out")?.map(PathBuf::from),
            record: match e.choice("run.record", "auto", &["auto", "always", "never"])?.as_str() {
                "auto" => IterateRecording::Auto,
                "always" => IterateRecording::Always,
                _ => IterateRecording::Never,
            },
            jobs: e.opt("run.jobs")?,
            echo,
        };
        Ok(cfg)
    }

    /// Key/value pairs exactly as read, in file order, with CLI overrides applied.
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.echo.iter().cloned().collect()
    }

    fn set_echo(&mut self, key: &str, value: String) {
        match self.echo.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.echo.push((key.to_string(), value)),
        }
    }

    pub fn override_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.set_echo("run.seed", seed.to_string());
    }

    pub fn override_reps(&mut self, reps: u32) {
        self.reps = reps;
        self.set_echo("run.reps", reps.to_string());
    }

    pub fn override_budget(&mut self, budget: u64) {
        self.budget = budget;
        self.set_echo("run.budget", budget.to_string());
    }

    pub fn override_out(&mut self, out: PathBuf) {
        self.set_echo("run.out", out.display().to_string());
        self.out_dir = Some(out);
    }

    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.echo {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// Builds the problem and policy, checking every constraint up front.
    pub fn build(&self) -> Result<(ProblemInstance, Policy)> {
        let wrap = |e: Error| match e {
            Error::Io { .. } => e,
            other => Error::Validation(other.to_string()),
        };
        if self.horizon < 1 {
            return Err(Error::Validation("run.horizon must be at least 1".into()));
        }
        if self.reps < 1 {
            return Err(Error::Validation("run.reps must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Validation("run.jobs must be at least 1".into()));
        }
        let problem = make_random_quadratic(&self.problem).map_err(wrap)?;
        let policy = match self.algorithm {
            Algorithm::Accelerated => {
                let p = &self.smooth;
                if !(p.phi > 0.0 && p.phi < 1.0) {
                    return Err(Error::Validation(format!("policy.phi must lie in (0, 1), got {}", p.phi)));
                }
                let a = p.a.unwrap_or(problem.l);
                Policy::Smooth(SmoothPolicy::new(p.mu, a, p.b, p.delta, p.n0, problem.l, p.beta_variant).map_err(wrap)?)
            }
            Algorithm::ProxGradient => {
                if !problem.is_strongly_convex() {
                    return Err(Error::Validation("prox_gradient needs a strongly convex problem (c > 0)".into()));
                }
                let p = &self.strong;
                let phi = p.phi.unwrap_or(p.mu * problem.c / (4.0 * problem.l));
                let policy = match p.zeta {
                    ZetaChoice::Fixed(z) => StrongPolicy::new(p.mu, z, p.n0, phi, problem.l, problem.c),
                    ZetaChoice::Matched { a_frac } => {
                        let a_frac = match a_frac {
                            Some(a) => a,
                            None => admissible_a_frac(p.mu, problem.c, problem.l, phi).map_err(wrap)? * (1.0 - 1e-9),
                        };
                        StrongPolicy::matched(p.mu, p.n0, phi, a_frac, problem.l, problem.c)
                    }
                };
                Policy::Strong(policy.map_err(wrap)?)
            }
        };
        Ok((problem, policy))
    }

    pub fn validate(&self) -> Result<()> {
        self.build().map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
        # smooth run
        experiment.name = demo
        run.algorithm = accelerated
        problem.dim = 5
        problem.spectrum = rank_deficient
        oracle.kind = random_matrix
        oracle.scale = 0.1
        constraint.kind = box
        constraint.lo = -2
        constraint.hi = 2
        policy.delta = 44   # clamps t0
        run.reps = 3
    ";

    #[test]
    fn parses_and_echoes() {
        let c = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.name, "demo");
        assert_eq!(c.problem.dim, 5);
        assert_eq!(c.smooth.delta, 44.0);
        assert_eq!(c.echo()["policy.delta"], "44");
        assert!(matches!(c.problem.constraint, ConstraintSpec::Box { ref lo, .. } if lo == &vec![-2.0; 5]));
        c.validate().unwrap();
        let again = ExperimentConfig::parse(&c.to_config_string()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ExperimentConfig::parse("problem.dimm = 3"), Err(Error::Config { line: 1, .. })));
        assert!(ExperimentConfig::parse("a = 1\na = 2").is_err());
        assert!(ExperimentConfig::parse("problem.dim = x").is_err());
        assert!(ExperimentConfig::parse("just text").is_err());
        assert!(ExperimentConfig::parse("oracle.kind = laplace").is_err());
        let c = ExperimentConfig::parse("run.algorithm = prox_gradient\nproblem.spectrum = rank_deficient").unwrap();
        assert!(matches!(c.validate(), Err(Error::Validation(_))));
        let c = ExperimentConfig::parse("regularizer.kind = l1\nregularizer.lambda = 0.1\nconstraint.kind = ball").unwrap();
        assert!(c.validate().is_err());
        let c = ExperimentConfig::parse("run.algorithm = prox_gradient\npolicy.phi = 0.01\npolicy.a_frac = 1").unwrap();
        assert!(c.validate().is_err());
    }
}
