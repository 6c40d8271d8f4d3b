//! Synthetic composite quadratic problems `g(x) = f(x) + phi(x)` over a
//! convex set, with closed-form constants and reference solutions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::rng::{fill_standard_normal, purpose, RngStream};
use crate::numeric::vector::{self, check_dim};
use crate::oracle::OracleModel;
use crate::prox::{self, ConstraintSpec, RegularizerSpec};

pub const FEASIBILITY_TOL: f64 = 1e-9;
pub const REFERENCE_TOL: f64 = 1e-12;
const REFERENCE_MAX_ITER: usize = 200_000;

/// Symmetric PSD matrix `Q diag(eigenvalues) Q^T`; `rotation` is the
/// row-major orthogonal `Q`, absent for a diagonal matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanMatrix {
    eigenvalues: Vec<f64>,
    rotation: Option<Vec<f64>>,
}

impl MeanMatrix {
    pub fn diagonal(eigenvalues: Vec<f64>) -> Self {
        MeanMatrix { eigenvalues, rotation: None }
    }

    pub fn rotated(eigenvalues: Vec<f64>, rotation: Vec<f64>) -> Result<Self> {
        let d = eigenvalues.len();
        check_dim(d * d, rotation.len())?;
        Ok(MeanMatrix { eigenvalues, rotation: Some(rotation) })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn is_diagonal(&self) -> bool {
        self.rotation.is_none()
    }

    /// Coordinates of `x` in the eigenbasis (`Q^T x`).
    pub fn to_eigen(&self, x: &[f64]) -> Vec<f64> {
        match &self.rotation {
            None => x.to_vec(),
            Some(q) => {
                let d = self.dim();
                let mut w = vec![0.0; d];
                for (i, xi) in x.iter().enumerate() {
                    let row = &q[i * d..(i + 1) * d];
                    for (wj, qij) in w.iter_mut().zip(row) {
                        *wj += qij * xi;
                    }
                }
                w
            }
        }
    }

    pub fn from_eigen(&self, w: &[f64]) -> Vec<f64> {
        match &self.rotation {
            None => w.to_vec(),
            Some(q) => {
                let d = self.dim();
                (0..d).map(|i| vector::dot(&q[i * d..(i + 1) * d], w)).collect()
            }
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match &self.rotation {
            None => x.iter().zip(&self.eigenvalues).map(|(v, l)| l * v).collect(),
            Some(_) => {
                let mut w = self.to_eigen(x);
                for (wi, l) in w.iter_mut().zip(&self.eigenvalues) {
                    *wi *= l;
                }
                self.from_eigen(&w)
            }
        }
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        match &self.rotation {
            None => x.iter().zip(&self.eigenvalues).map(|(v, l)| l * v * v).sum(),
            Some(_) => self.to_eigen(x).iter().zip(&self.eigenvalues).map(|(v, l)| l * v * v).sum(),
        }
    }

    /// Row-major dense copy.
    pub fn dense(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d * d];
        for j in 0..d {
            let mut e = vec![0.0; d];
            e[j] = 1.0;
            for (i, v) in self.apply(&e).into_iter().enumerate() {
                out[i * d + j] = v;
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumSpec {
    /// Smallest eigenvalue `c`, largest `l`.
    Conditioned { c: f64, l: f64 },
    /// One zero eigenvalue, the rest in `[floor * l, l]`.
    RankDeficient { l: f64, floor: f64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumLayout {
    /// Interior eigenvalues evenly spaced in log scale.
    #[default]
    Geometric,
    /// Interior eigenvalues drawn log-uniformly.
    LogUniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticSpec {
    pub dim: usize,
    pub spectrum: SpectrumSpec,
    pub layout: SpectrumLayout,
    pub rotate: bool,
    /// Magnitude of each entry of the planted unconstrained minimizer.
    pub plant_scale: f64,
    pub regularizer: RegularizerSpec,
    pub constraint: ConstraintSpec,
    pub oracle: OracleModel,
    pub seed: u64,
}

impl QuadraticSpec {
    pub fn new(dim: usize, spectrum: SpectrumSpec, oracle: OracleModel) -> Self {
        QuadraticSpec {
            dim,
            spectrum,
            layout: SpectrumLayout::Geometric,
            rotate: false,
            plant_scale: 1.0,
            regularizer: RegularizerSpec::Zero,
            constraint: ConstraintSpec::AllSpace,
            oracle,
            seed: 0,
        }
    }

    pub fn largest_eigenvalue(&self) -> f64 {
        match self.spectrum {
            SpectrumSpec::Conditioned { l, .. } | SpectrumSpec::RankDeficient { l, .. } => l,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub dim: usize,
    pub matrix: MeanMatrix,
    pub b: Vec<f64>,
    pub regularizer: RegularizerSpec,
    pub constraint: ConstraintSpec,
    pub oracle: OracleModel,
    pub l: f64,
    pub c: f64,
    pub x_star: Vec<f64>,
    pub g_star: f64,
    pub sigma_star: f64,
    pub sigma_l: f64,
    pub kappa: Option<f64>,
}

fn interior_spectrum(lo: f64, hi: f64, count: usize, layout: SpectrumLayout, stream: &RngStream) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let mut v: Vec<f64> = match layout {
        SpectrumLayout::Geometric => {
            (0..count).map(|k| (a + (b - a) * (k + 1) as f64 / (count + 1) as f64).exp()).collect()
        }
        SpectrumLayout::LogUniform => {
            let mut rng = stream.rng();
            (0..count).map(|_| (a + (b - a) * rng.random::<f64>()).exp()).collect()
        }
    };
    v.sort_by(f64::total_cmp);
    v
}

fn random_rotation(d: usize, stream: &RngStream) -> Vec<f64> {
    let mut rng = stream.rng();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v = vec![0.0; d];
        fill_standard_normal(&mut rng, &mut v);
        for _ in 0..2 {
            for c in &cols {
                let p = vector::dot(c, &v);
                vector::axpy(-p, c, &mut v);
            }
        }
        let n = vector::norm(&v);
        if n > 1e-8 {
            cols.push(vector::scale(&v, 1.0 / n));
        }
    }
    let mut q = vec![0.0; d * d];
    for (j, c) in cols.iter().enumerate() {
        for (i, v) in c.iter().enumerate() {
            q[i * d + j] = *v;
        }
    }
    q
}

fn spectrum_values(spec: &QuadraticSpec, stream: &RngStream) -> Result<Vec<f64>> {
    let d = spec.dim;
    let bad = |reason: String| Error::param("problem.spectrum", reason);
    match spec.spectrum {
        SpectrumSpec::Conditioned { c, l } => {
            if !(l > 0.0 && l.is_finite() && c >= 0.0 && c <= l) {
                return Err(bad(format!("need 0 <= c <= L with L > 0, got c={c}, L={l}")));
            }
            if c == 0.0 {
                let mut s = spec.clone();
                s.spectrum = SpectrumSpec::RankDeficient { l, floor: 1e-6 };
                return spectrum_values(&s, stream);
            }
            if d == 1 {
                if c != l {
                    return Err(bad(format!("d=1 needs c = L, got c={c}, L={l}")));
                }
                return Ok(vec![l]);
            }
            let mut v = vec![c];
            if c < l {
                v.extend(interior_spectrum(c, l, d - 2, spec.layout, stream));
            } else {
                v.extend(std::iter::repeat_n(c, d - 2));
            }
            v.push(l);
            Ok(v)
        }
        SpectrumSpec::RankDeficient { l, floor } => {
            if !(l > 0.0 && l.is_finite()) || !(floor > 0.0 && floor <= 1.0) {
                return Err(bad(format!("need L > 0 and floor in (0, 1], got L={l}, floor={floor}")));
            }
            if d < 2 {
                return Err(bad("a rank-deficient spectrum needs d >= 2".into()));
            }
            let mut v = vec![0.0];
            if d > 2 {
                let lo = floor * l;
                v.push(lo);
                if d > 3 {
                    v.extend(interior_spectrum(lo, l, d - 3, spec.layout, stream));
                }
            }
            v.push(l);
            Ok(v)
        }
    }
}

/// Builds a random quadratic with the requested spectrum. The linear term is
/// `b = -A x_plant` where `x_plant` has entries `+-plant_scale`.
pub fn make_random_quadratic(spec: &QuadraticSpec) -> Result<ProblemInstance> {
    if spec.dim == 0 {
        return Err(Error::param("problem.dim", "must be at least 1"));
    }
    if !(spec.plant_scale >= 0.0 && spec.plant_scale.is_finite()) {
        return Err(Error::param("problem.plant_scale", format!("must be finite and nonnegative, got {}", spec.plant_scale)));
    }
    let root = RngStream::new(spec.seed).child(purpose::PROBLEM);
    let eig = spectrum_values(spec, &root.child(0))?;
    let matrix = if spec.rotate && spec.dim > 1 {
        MeanMatrix::rotated(eig, random_rotation(spec.dim, &root.child(purpose::ROTATION)))?
    } else {
        MeanMatrix::diagonal(eig)
    };
    let mut rng = root.child(1).rng();
    let plant: Vec<f64> = (0..spec.dim)
        .map(|_| if rng.random::<bool>() { spec.plant_scale } else { -spec.plant_scale })
        .collect();
    let b = vector::scale(&matrix.apply(&plant), -1.0);
    ProblemInstance::new(matrix, b, spec.regularizer.clone(), spec.constraint.clone(), spec.oracle.clone())
}

impl ProblemInstance {
    pub fn new(
        matrix: MeanMatrix,
        b: Vec<f64>,
        regularizer: RegularizerSpec,
        constraint: ConstraintSpec,
        oracle: OracleModel,
    ) -> Result<Self> {
        let dim = matrix.dim();
        if dim == 0 {
            return Err(Error::param("problem.dim", "must be at least 1"));
        }
        check_dim(dim, b.len())?;
        let eig = matrix.eigenvalues();
        if eig.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::param("problem.spectrum", "eigenvalues must be finite and nonnegative"));
        }
        let l = eig.iter().copied().fold(0.0, f64::max);
        let c = eig.iter().copied().fold(f64::INFINITY, f64::min);
        if !(l > 0.0) {
            return Err(Error::param("problem.spectrum", "largest eigenvalue must be positive"));
        }
        if !vector::all_finite(&b) {
            return Err(Error::param("problem.b", "entries must be finite"));
        }
        regularizer.validate()?;
        constraint.validate(dim)?;
        prox::check_supported(&regularizer, &constraint)?;
        oracle.validate()?;
        let mut p = ProblemInstance {
            dim,
            matrix,
            b,
            regularizer,
            constraint,
            sigma_l: oracle.sigma_l(dim),
            oracle,
            l,
            c,
            x_star: vec![0.0; dim],
            g_star: 0.0,
            sigma_star: 0.0,
            kappa: if c > 0.0 { Some(l / c) } else { None },
        };
        let (x, g) = reference_solution(&p, REFERENCE_TOL)?;
        p.sigma_star = p.oracle.pointwise_sigma(&x);
        p.x_star = x;
        p.g_star = g;
        Ok(p)
    }

    /// Diagonal problem `0.5 <x, diag(a) x> + <b, x>` with the given pieces.
    pub fn diagonal(
        diag: Vec<f64>,
        b: Vec<f64>,
        regularizer: RegularizerSpec,
        constraint: ConstraintSpec,
        oracle: OracleModel,
    ) -> Result<Self> {
        Self::new(MeanMatrix::diagonal(diag), b, regularizer, constraint, oracle)
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.c > 0.0
    }

    pub fn require_strongly_convex(&self) -> Result<()> {
        if self.is_strongly_convex() {
            Ok(())
        } else {
            Err(Error::param("problem.spectrum", "this method needs a strongly convex problem (c > 0)"))
        }
    }

    pub fn smooth_value(&self, x: &[f64]) -> f64 {
        0.5 * self.matrix.quad_form(x) + vector::dot(&self.b, x)
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.smooth_value(x) + prox::reg_value(&self.regularizer, x)
    }

    pub fn true_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        Ok(self.gradient_unchecked(x))
    }

    pub(crate) fn gradient_unchecked(&self, x: &[f64]) -> Vec<f64> {
        vector::add(&self.matrix.apply(x), &self.b)
    }

    /// `g(x) - g*`, expanded around `x*`.
    pub fn gap(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        let violation = self.constraint.violation(x);
        if violation > FEASIBILITY_TOL {
            return Err(Error::Infeasible { violation });
        }
        Ok(self.gap_unchecked(x))
    }

    pub(crate) fn gap_unchecked(&self, x: &[f64]) -> f64 {
        let e = vector::sub(x, &self.x_star);
        let grad_star = self.gradient_unchecked(&self.x_star);
        0.5 * self.matrix.quad_form(&e) + vector::dot(&grad_star, &e)
            + (prox::reg_value(&self.regularizer, x) - prox::reg_value(&self.regularizer, &self.x_star))
    }

    pub fn dist_sq_to_star(&self, x: &[f64]) -> f64 {
        vector::dist_sq(x, &self.x_star)
    }

    /// `|x - prox(x, grad f(x), 1/L)|`, zero exactly at minimizers.
    pub fn prox_residual(&self, x: &[f64]) -> Result<f64> {
        let g = self.true_gradient(x)?;
        let p = prox::prox_step(&self.regularizer, &self.constraint, x, &g, 1.0 / self.l)?;
        Ok(vector::dist_sq(x, &p).sqrt())
    }

    /// Largest eigenvalue of the noise matrix `B` (zero without multiplicative noise).
    pub fn noise_matrix_eigenvalue(&self) -> f64 {
        self.oracle.noise_matrix_eigenvalue(self.dim)
    }
}

/// Minimizer of `0.5 a x^2 + b x + w2 x^2 + w1 |x|` over `[lo, hi]`.
fn scalar_minimizer(a: f64, b: f64, w2: f64, w1: f64, lo: f64, hi: f64) -> Result<f64> {
    let q = a + 2.0 * w2;
    if q > 0.0 {
        return Ok((prox::soft_threshold(-b, w1) / q).clamp(lo, hi));
    }
    if b.abs() <= w1 {
        Ok(0.0f64.clamp(lo, hi))
    } else if b > w1 {
        if lo.is_finite() {
            Ok(lo)
        } else {
            Err(Error::Unbounded("objective decreases without bound along a flat direction".into()))
        }
    } else if hi.is_finite() {
        Ok(hi)
    } else {
        Err(Error::Unbounded("objective decreases without bound along a flat direction".into()))
    }
}

/// Exact minimizer and optimal value, in closed form where the structure
/// allows it and by restarted deterministic FISTA otherwise.
pub fn reference_solution(problem: &ProblemInstance, tol: f64) -> Result<(Vec<f64>, f64)> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    let d = problem.dim;
    let (w2, w1) = problem.regularizer.weights();
    let x = match (&problem.constraint, problem.matrix.is_diagonal()) {
        (ConstraintSpec::AllSpace, true) | (ConstraintSpec::Box { .. }, true) => {
            let (lo, hi) = match &problem.constraint {
                ConstraintSpec::Box { lo, hi } => (lo.clone(), hi.clone()),
                _ => (vec![f64::NEG_INFINITY; d], vec![f64::INFINITY; d]),
            };
            let eig = problem.matrix.eigenvalues();
            (0..d)
                .map(|i| scalar_minimizer(eig[i], problem.b[i], w2, w1, lo[i], hi[i]))
                .collect::<Result<Vec<f64>>>()?
        }
        (ConstraintSpec::AllSpace, false) if w1 == 0.0 => {
            let w = problem.matrix.to_eigen(&problem.b);
            let scale = vector::norm(&problem.b).max(1.0);
            let xe = w
                .iter()
                .zip(problem.matrix.eigenvalues())
                .map(|(wi, l)| {
                    let den = l + 2.0 * w2;
                    if den > 0.0 {
                        Ok(-wi / den)
                    } else if wi.abs() <= 1e-12 * scale {
                        Ok(0.0)
                    } else {
                        Err(Error::Unbounded("linear term has a component in the null space".into()))
                    }
                })
                .collect::<Result<Vec<f64>>>()?;
            problem.matrix.from_eigen(&xe)
        }
        _ => restarted_fista(problem, tol)?,
    };
    let g = problem.objective(&x);
    Ok((x, g))
}

fn restarted_fista(problem: &ProblemInstance, tol: f64) -> Result<Vec<f64>> {
    let alpha = 1.0 / problem.l;
    let step = |y: &[f64]| -> Result<Vec<f64>> {
        let g = problem.gradient_unchecked(y);
        prox::prox_step(&problem.regularizer, &problem.constraint, y, &g, alpha)
    };
    let mut x = problem.constraint.project(&vec![0.0; problem.dim]);
    let mut y = x.clone();
    let mut theta = 1.0f64;
    let mut residual = f64::INFINITY;
    for it in 0..REFERENCE_MAX_ITER {
        let x_new = step(&y)?;
        let restart = vector::dot(&vector::sub(&y, &x_new), &vector::sub(&x_new, &x)) > 0.0;
        let theta_new = 0.5 * (1.0 + (1.0 + 4.0 * theta * theta).sqrt());
        if restart {
            theta = 1.0;
            y = x_new.clone();
        } else {
            let coef = (theta - 1.0) / theta_new;
            y = x_new.iter().zip(&x).map(|(a, b)| a + coef * (a - b)).collect();
            theta = theta_new;
        }
        x = x_new;
        if it % 16 == 0 {
            residual = vector::dist_sq(&x, &step(&x)?).sqrt();
            if residual <= tol * vector::norm(&x).max(1.0) {
                return Ok(x);
            }
        }
    }
    Err(Error::NoConvergence { iterations: REFERENCE_MAX_ITER, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero() -> OracleModel {
        OracleModel::noiseless()
    }

    #[test]
    fn scalar_example() {
        let p = ProblemInstance::diagonal(vec![2.0], vec![-2.0], RegularizerSpec::Zero, ConstraintSpec::AllSpace, zero()).unwrap();
        assert_eq!(p.x_star, vec![1.0]);
        assert_eq!(p.g_star, -1.0);
        assert_eq!((p.l, p.c), (2.0, 2.0));
        assert_eq!(p.gap(&[0.0]).unwrap(), 1.0);
        assert_eq!(p.gap(&p.x_star).unwrap(), 0.0);
    }

    #[test]
    fn l1_examples() {
        let p = ProblemInstance::diagonal(vec![1.0, 3.0], vec![0.0, 0.0], RegularizerSpec::L1 { lambda: 0.5 }, ConstraintSpec::AllSpace, zero()).unwrap();
        assert_eq!(p.x_star, vec![0.0, 0.0]);
        assert_eq!(p.g_star, 0.0);
        let p = ProblemInstance::diagonal(vec![1.0], vec![-3.0], RegularizerSpec::L1 { lambda: 1.0 }, ConstraintSpec::AllSpace, zero()).unwrap();
        assert_eq!(p.x_star, vec![2.0]);
    }

    #[test]
    fn ridge_and_gradient() {
        let p = ProblemInstance::diagonal(vec![1.0, 3.0], vec![-2.0, 1.0], RegularizerSpec::SquaredL2 { lambda: 0.5 }, ConstraintSpec::AllSpace, zero()).unwrap();
        assert_eq!(p.x_star, vec![1.0, -0.25]);
        let q = ProblemInstance::diagonal(vec![1.0, 3.0], vec![0.0, 0.0], RegularizerSpec::Zero, ConstraintSpec::AllSpace, zero()).unwrap();
        assert_eq!(q.true_gradient(&[1.0, 1.0]).unwrap(), vec![1.0, 3.0]);
        assert_eq!(p.true_gradient(&[0.0, 0.0]).unwrap(), p.b);
        assert!(p.true_gradient(&[0.0]).is_err());
    }

    #[test]
    fn rank_deficient_and_ball() {
        let spec = QuadraticSpec::new(3, SpectrumSpec::RankDeficient { l: 1.0, floor: 1e-3 }, zero());
        let p = make_random_quadratic(&spec).unwrap();
        assert_eq!(p.c, 0.0);
        assert!(p.kappa.is_none());
        assert!(p.require_strongly_convex().is_err());

        let ball = ConstraintSpec::centered_ball(2, 0.5);
        let p = ProblemInstance::diagonal(vec![1.0, 2.0], vec![-1.0, -1.0], RegularizerSpec::Zero, ball, zero()).unwrap();
        assert!(p.gap(&[1.0, 1.0]).is_err());
        assert!(p.prox_residual(&p.x_star).unwrap() <= 1e-9);
        assert!(p.constraint.contains(&p.x_star, FEASIBILITY_TOL));
    }

    #[test]
    fn rotated_closed_form_matches_fallback() {
        let mut spec = QuadraticSpec::new(6, SpectrumSpec::Conditioned { c: 0.5, l: 4.0 }, zero());
        spec.rotate = true;
        spec.seed = 3;
        let p = make_random_quadratic(&spec).unwrap();
        let x_fb = restarted_fista(&p, 1e-13).unwrap();
        assert!(vector::dist_sq(&x_fb, &p.x_star).sqrt() < 1e-10);
        let g = p.true_gradient(&p.x_star).unwrap();
        assert!(vector::norm(&g) < 1e-12);
    }

    #[test]
    fn spectrum_extremes() {
        let spec = QuadraticSpec::new(10, SpectrumSpec::Conditioned { c: 0.1, l: 1.0 }, zero());
        let p = make_random_quadratic(&spec).unwrap();
        assert_eq!(p.l, 1.0);
        assert_eq!(p.c, 0.1);
        assert!((p.kappa.unwrap() - 10.0).abs() < 1e-12);
        let e = p.matrix.eigenvalues();
        assert!(e.windows(2).all(|w| w[0] <= w[1]));
        assert!(make_random_quadratic(&QuadraticSpec::new(2, SpectrumSpec::Conditioned { c: 2.0, l: 1.0 }, zero())).is_err());
    }

    #[test]
    fn box_with_flat_direction_uses_boundary() {
        let p = ProblemInstance::diagonal(
            vec![0.0, 1.0],
            vec![0.5, -1.0],
            RegularizerSpec::Zero,
            ConstraintSpec::uniform_box(2, -2.0, 2.0),
            zero(),
        )
        .unwrap();
        assert_eq!(p.x_star, vec![-2.0, 1.0]);
        assert!(ProblemInstance::diagonal(vec![0.0, 1.0], vec![0.5, -1.0], RegularizerSpec::Zero, ConstraintSpec::AllSpace, zero()).is_err());
    }
}
