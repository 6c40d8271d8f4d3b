//! Stochastic first-order oracles for quadratic problems.
//!
//! `Additive` perturbs the exact gradient by isotropic Gaussian noise of
//! total variance `sigma^2`. `RandomMatrix` samples `A = A_bar + s G` and
//! `b = b_bar + s_b h` with standard normal `G`, `h`, and returns `A x + b`,
//! so its standard deviation grows linearly with `|x|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::rng::{fill_standard_normal, standard_normal, RngStream, StreamRng};
use crate::numeric::vector::{self, check_dim};
use crate::problems::ProblemInstance;

/// Batches up to this size are drawn sample by sample under `Auto`.
pub const EXPLICIT_BATCH_LIMIT: u64 = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    Additive { sigma: f64 },
    RandomMatrix { scale: f64, vector_scale: f64 },
}

/// How a mini-batch mean is produced. `Aggregated` draws the mean's error
/// directly from its exact Gaussian law, which costs O(d) regardless of the
/// batch size.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchSampling {
    Explicit,
    Aggregated,
    #[default]
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleModel {
    pub noise: NoiseKind,
    pub sampling: BatchSampling,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MiniBatch {
    pub grad: Vec<f64>,
    pub count: u64,
}

/// Per-run count of single-sample gradient evaluations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OracleCounter(u64);

impl OracleCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn calls(&self) -> u64 {
        self.0
    }

    fn charge(&mut self, n: u64) {
        self.0 += n;
    }
}

impl OracleModel {
    pub fn additive(sigma: f64) -> Self {
        OracleModel { noise: NoiseKind::Additive { sigma }, sampling: BatchSampling::Auto }
    }

    pub fn random_matrix(scale: f64, vector_scale: f64) -> Self {
        OracleModel { noise: NoiseKind::RandomMatrix { scale, vector_scale }, sampling: BatchSampling::Auto }
    }

    pub fn noiseless() -> Self {
        Self::additive(0.0)
    }

    pub fn with_sampling(mut self, sampling: BatchSampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        match self.noise {
            NoiseKind::Additive { sigma } if !ok(sigma) => {
                Err(Error::param("oracle.sigma", format!("must be finite and nonnegative, got {sigma}")))
            }
            NoiseKind::RandomMatrix { scale, vector_scale } if !ok(scale) || !ok(vector_scale) => Err(Error::param(
                "oracle.scale",
                format!("scales must be finite and nonnegative, got {scale}, {vector_scale}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.noise {
            NoiseKind::Additive { .. } => "additive",
            NoiseKind::RandomMatrix { .. } => "random_matrix",
        }
    }

    pub fn is_noiseless(&self) -> bool {
        match self.noise {
            NoiseKind::Additive { sigma } => sigma == 0.0,
            NoiseKind::RandomMatrix { scale, vector_scale } => scale == 0.0 && vector_scale == 0.0,
        }
    }

    /// Exact `sigma(x) = (E |grad F(x) - grad f(x)|^2)^(1/2)`.
    pub fn pointwise_sigma(&self, x: &[f64]) -> f64 {
        match self.noise {
            NoiseKind::Additive { sigma } => sigma,
            NoiseKind::RandomMatrix { scale, vector_scale } => {
                (x.len() as f64 * (scale * scale * vector::norm_sq(x) + vector_scale * vector_scale)).sqrt()
            }
        }
    }

    /// Exact multiplicative slope `sigma_L` with `sigma(x) <= sigma(x*) + sigma_L |x - x*|`.
    pub fn sigma_l(&self, d: usize) -> f64 {
        match self.noise {
            NoiseKind::Additive { .. } => 0.0,
            NoiseKind::RandomMatrix { scale, .. } => scale * (d as f64).sqrt(),
        }
    }

    /// `lambda_max(B)` for `B = sum_i cov[A_i]`, here `d s^2 I`.
    pub fn noise_matrix_eigenvalue(&self, d: usize) -> f64 {
        match self.noise {
            NoiseKind::Additive { .. } => 0.0,
            NoiseKind::RandomMatrix { scale, .. } => d as f64 * scale * scale,
        }
    }

    fn explicit_for(&self, n: u64) -> bool {
        match self.sampling {
            BatchSampling::Explicit => true,
            BatchSampling::Aggregated => false,
            BatchSampling::Auto => n <= EXPLICIT_BATCH_LIMIT,
        }
    }

    /// Adds one sample's noise to `out`.
    fn add_sample_noise(&self, rng: &mut StreamRng, x: &[f64], out: &mut [f64]) {
        let d = x.len();
        match self.noise {
            NoiseKind::Additive { sigma } => {
                let sd = sigma / (d as f64).sqrt();
                for o in out.iter_mut() {
                    *o += sd * standard_normal(rng);
                }
            }
            NoiseKind::RandomMatrix { scale, vector_scale } => {
                let mut row = vec![0.0; d];
                for o in out.iter_mut() {
                    fill_standard_normal(rng, &mut row);
                    let h = standard_normal(rng);
                    *o += scale * vector::dot(&row, x) + vector_scale * h;
                }
            }
        }
    }

    fn coordinate_sd(&self, x: &[f64]) -> f64 {
        self.pointwise_sigma(x) / (x.len() as f64).sqrt()
    }
}

/// One stochastic gradient at `x`.
pub fn sample_gradient(model: &OracleModel, problem: &ProblemInstance, x: &[f64], stream: &RngStream) -> Result<Vec<f64>> {
    check_dim(problem.dim, x.len())?;
    let mut g = problem.gradient_unchecked(x);
    if !model.is_noiseless() {
        model.add_sample_noise(&mut stream.rng(), x, &mut g);
    }
    Ok(g)
}

/// Mean of `n` independent stochastic gradients at `x`.
pub fn minibatch_gradient(
    model: &OracleModel,
    problem: &ProblemInstance,
    x: &[f64],
    n: u64,
    stream: &RngStream,
    counter: &mut OracleCounter,
) -> Result<MiniBatch> {
    if n < 1 {
        return Err(Error::param("N", "batch size must be at least 1"));
    }
    check_dim(problem.dim, x.len())?;
    let mut grad = problem.gradient_unchecked(x);
    if !model.is_noiseless() {
        let mut rng = stream.rng();
        if model.explicit_for(n) {
            let mut noise = vec![0.0; x.len()];
            for _ in 0..n {
                model.add_sample_noise(&mut rng, x, &mut noise);
            }
            let inv = 1.0 / n as f64;
            for (g, e) in grad.iter_mut().zip(&noise) {
                *g += e * inv;
            }
        } else {
            let sd = model.coordinate_sd(x) / (n as f64).sqrt();
            for g in grad.iter_mut() {
                *g += sd * standard_normal(&mut rng);
            }
        }
    }
    counter.charge(n);
    Ok(MiniBatch { grad, count: n })
}

/// `(sigma(x*) + sigma_L * dist) / sqrt(N)`.
pub fn variance_decay_bound(sigma_star: f64, sigma_l: f64, dist: f64, n: u64) -> Result<f64> {
    if n < 1 {
        return Err(Error::param("N", "batch size must be at least 1"));
    }
    for (name, v) in [("sigma_star", sigma_star), ("sigma_L", sigma_l), ("dist", dist)] {
        if !(v >= 0.0) {
            return Err(Error::param(name, format!("must be nonnegative, got {v}")));
        }
    }
    Ok((sigma_star + sigma_l * dist) / (n as f64).sqrt())
}

/// Monte Carlo `sigma(x)` from `m` single samples.
pub fn estimate_pointwise_sigma(
    model: &OracleModel,
    problem: &ProblemInstance,
    x: &[f64],
    m: u64,
    stream: &RngStream,
) -> Result<f64> {
    if m < 2 {
        return Err(Error::param("M", "need at least 2 samples"));
    }
    check_dim(problem.dim, x.len())?;
    if model.is_noiseless() {
        return Ok(0.0);
    }
    let mut rng = stream.rng();
    let mut acc = crate::numeric::NeumaierSum::new();
    let mut noise = vec![0.0; x.len()];
    for _ in 0..m {
        noise.iter_mut().for_each(|v| *v = 0.0);
        model.add_sample_noise(&mut rng, x, &mut noise);
        acc.add(vector::norm_sq(&noise));
    }
    Ok((acc.value() / m as f64).sqrt())
}

/// Largest empirical slope `(sigma(p) - sigma(anchor)) / |p - anchor|` over
/// the probes, clamped at zero.
pub fn estimate_sigma_l(
    model: &OracleModel,
    problem: &ProblemInstance,
    anchor: &[f64],
    probes: &[Vec<f64>],
    m: u64,
    stream: &RngStream,
) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::EmptyInput("estimate_sigma_l needs at least one probe"));
    }
    let base = estimate_pointwise_sigma(model, problem, anchor, m, &stream.child(0))?;
    let mut best = 0.0f64;
    for (k, p) in probes.iter().enumerate() {
        check_dim(problem.dim, p.len())?;
        let dist = vector::dist_sq(p, anchor).sqrt();
        if dist == 0.0 {
            return Err(Error::param("probes", format!("probe {k} coincides with the anchor")));
        }
        let s = estimate_pointwise_sigma(model, problem, p, m, &stream.child(k as u32 + 1))?;
        best = best.max((s - base) / dist);
    }
    Ok(best)
}

fn operator_norm(a: &[f64], d: usize) -> f64 {
    let mut v = vec![1.0 / (d as f64).sqrt(); d];
    let mut est = 0.0;
    for _ in 0..100 {
        let av: Vec<f64> = (0..d).map(|i| vector::dot(&a[i * d..(i + 1) * d], &v)).collect();
        let mut atav = vec![0.0; d];
        for (i, s) in av.iter().enumerate() {
            vector::axpy(*s, &a[i * d..(i + 1) * d], &mut atav);
        }
        let n = vector::norm(&atav);
        if n == 0.0 {
            return 0.0;
        }
        let next = n.sqrt();
        v = vector::scale(&atav, 1.0 / n);
        if (next - est).abs() <= 1e-10 * next {
            return next;
        }
        est = next;
    }
    est
}

/// Monte Carlo `(E |A(xi)|_op^2)^(1/2)` by power iteration on each sample.
pub fn estimate_random_lipschitz(model: &OracleModel, problem: &ProblemInstance, m: u64, stream: &RngStream) -> Result<f64> {
    if m < 1 {
        return Err(Error::param("M", "need at least 1 sample"));
    }
    let d = problem.dim;
    let mean = problem.matrix.dense();
    let scale = match model.noise {
        NoiseKind::Additive { .. } => return Ok(problem.l),
        NoiseKind::RandomMatrix { scale, .. } => scale,
    };
    let mut rng = stream.rng();
    let mut acc = 0.0;
    let mut g = vec![0.0; d * d];
    for _ in 0..m {
        fill_standard_normal(&mut rng, &mut g);
        let a: Vec<f64> = mean.iter().zip(&g).map(|(m, e)| m + scale * e).collect();
        acc += operator_norm(&a, d).powi(2);
    }
    Ok((acc / m as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::make_stream;
    use crate::prox::{ConstraintSpec, RegularizerSpec};

    fn problem(model: OracleModel) -> ProblemInstance {
        ProblemInstance::diagonal(vec![1.0, 2.0, 3.0], vec![-1.0, 0.5, 2.0], RegularizerSpec::Zero, ConstraintSpec::AllSpace, model).unwrap()
    }

    #[test]
    fn zero_noise_is_exact() {
        let x = [0.3, -1.0, 2.0];
        for m in [OracleModel::additive(0.0), OracleModel::random_matrix(0.0, 0.0)] {
            let p = problem(m.clone());
            let g = sample_gradient(&m, &p, &x, &make_stream(1, &[2])).unwrap();
            assert_eq!(g, p.true_gradient(&x).unwrap());
            assert_eq!(estimate_pointwise_sigma(&m, &p, &x, 10, &make_stream(1, &[3])).unwrap(), 0.0);
        }
    }

    #[test]
    fn decay_bound_examples() {
        assert_eq!(variance_decay_bound(2.0, 0.0, 5.0, 4).unwrap(), 1.0);
        assert_eq!(variance_decay_bound(0.0, 3.0, 2.0, 9).unwrap(), 2.0);
        assert_eq!(variance_decay_bound(1.0, 2.0, 0.5, 16).unwrap(), 0.5);
        assert!(variance_decay_bound(1.0, 2.0, 0.5, 0).is_err());
    }

    #[test]
    fn singleton_batch_equals_single_sample_and_counts_calls() {
        let m = OracleModel::random_matrix(0.3, 0.1);
        let p = problem(m.clone());
        let s = make_stream(5, &[1, 2]);
        let x = [1.0, 1.0, -1.0];
        let mut counter = OracleCounter::new();
        let b = minibatch_gradient(&m, &p, &x, 1, &s, &mut counter).unwrap();
        assert_eq!(b.grad, sample_gradient(&m, &p, &x, &s).unwrap());
        assert_eq!(counter.calls(), 1);
        minibatch_gradient(&m, &p, &x, 1000, &s, &mut counter).unwrap();
        assert_eq!(counter.calls(), 1001);
        assert!(minibatch_gradient(&m, &p, &x, 0, &s, &mut counter).is_err());
    }

    #[test]
    fn additive_batch_error_scales() {
        let m = OracleModel::additive(1.0).with_sampling(BatchSampling::Explicit);
        let p = problem(m.clone());
        let x = [0.0; 3];
        let g = p.true_gradient(&x).unwrap();
        let mut c = OracleCounter::new();
        let reps = 1000;
        let mut acc = 0.0;
        for r in 0..reps {
            let b = minibatch_gradient(&m, &p, &x, 100, &make_stream(9, &[r]), &mut c).unwrap();
            acc += vector::dist_sq(&b.grad, &g);
        }
        let rms = (acc / reps as f64).sqrt();
        assert!((0.085..=0.115).contains(&rms), "rms {rms}");
    }

    #[test]
    fn random_matrix_sigma_matches_closed_form() {
        let m = OracleModel::random_matrix(0.5, 0.0);
        let p = problem(m.clone());
        let x = [1.0, -2.0, 0.5];
        let est = estimate_pointwise_sigma(&m, &p, &x, 100_000, &make_stream(4, &[0])).unwrap();
        let bx = p.noise_matrix_eigenvalue() * vector::norm_sq(&x);
        assert!((est * est / bx - 1.0).abs() < 0.02, "{est} vs {}", bx.sqrt());
        assert!(est * est >= 0.9 * bx);
    }

    #[test]
    fn sigma_l_estimates() {
        let m = OracleModel::additive(1.0);
        let p = problem(m.clone());
        let probes = vec![vec![1.0, 0.0, 0.0], vec![0.0, 3.0, 0.0]];
        let s = estimate_sigma_l(&m, &p, &[0.0; 3], &probes, 100_000, &make_stream(2, &[0])).unwrap();
        assert!(s <= 0.05);
        assert!(estimate_sigma_l(&m, &p, &[0.0; 3], &[], 10, &make_stream(2, &[0])).is_err());
        assert!(estimate_sigma_l(&m, &p, &[0.0; 3], &[vec![0.0; 3]], 10, &make_stream(2, &[0])).is_err());

        let m = OracleModel::random_matrix(0.4, 0.2);
        let p = problem(m.clone());
        let s = estimate_sigma_l(&m, &p, &p.x_star, &[vec![3.0, -3.0, 3.0]], 20_000, &make_stream(2, &[1])).unwrap();
        let lhat = estimate_random_lipschitz(&m, &p, 500, &make_stream(2, &[3])).unwrap();
        assert!(s <= 1.05 * 2.0 * lhat);
        assert!(p.sigma_l <= 2.0 * lhat);
    }
}
