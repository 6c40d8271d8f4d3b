//! Stepsize, extrapolation and batch-size policies, threshold iterations,
//! contraction factors and the theoretical bound calculators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::DoubleDouble;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaVariant {
    /// `beta_t = (1 + t) / 2`
    #[default]
    Linear,
    /// `beta_1 = 1`, `beta_{t+1} = (1 + sqrt(1 + 4 beta_t^2)) / 2`
    Exact,
}

fn in_open_unit(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must lie in (0, 1), got {v}")))
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {v}")))
    }
}

fn nonnegative(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be nonnegative and finite, got {v}")))
    }
}

fn at_least_one(name: &'static str, v: u64) -> Result<()> {
    if v >= 1 {
        Ok(())
    } else {
        Err(Error::param(name, "must be at least 1"))
    }
}

/// Ceiling that treats values within 1e-12 (relative) of an integer as that integer.
fn ceil_snapped(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= 1e-12 * r.abs().max(1.0) {
        r
    } else {
        v.ceil()
    }
}

fn clamp_to_count(v: f64) -> Result<u64> {
    if !v.is_finite() || v > 9.0e15 {
        return Err(Error::param("t0", format!("threshold iteration is not representable ({v})")));
    }
    Ok(if v < 1.0 { 1 } else { v as u64 })
}

fn next_exact_beta(beta: DoubleDouble) -> DoubleDouble {
    let four = DoubleDouble::new(4.0);
    (DoubleDouble::ONE + (DoubleDouble::ONE + four * beta.sqr()).sqrt()) * DoubleDouble::new(0.5)
}

/// Iterator over `beta_1, beta_2, ...` in double-double precision.
#[derive(Clone, Debug)]
pub struct BetaSequence {
    variant: BetaVariant,
    t: u64,
    current: DoubleDouble,
}

impl BetaSequence {
    pub fn new(variant: BetaVariant) -> Self {
        BetaSequence { variant, t: 1, current: DoubleDouble::ONE }
    }
}

impl Iterator for BetaSequence {
    type Item = DoubleDouble;

    fn next(&mut self) -> Option<DoubleDouble> {
        let out = match self.variant {
            BetaVariant::Linear => DoubleDouble::new((1.0 + self.t as f64) / 2.0),
            BetaVariant::Exact => {
                let out = self.current;
                self.current = next_exact_beta(self.current);
                out
            }
        };
        self.t += 1;
        Some(out)
    }
}

pub fn fista_beta(t: u64, variant: BetaVariant) -> Result<f64> {
    at_least_one("t", t)?;
    Ok(match variant {
        BetaVariant::Linear => (1.0 + t as f64) / 2.0,
        BetaVariant::Exact => BetaSequence::new(variant).nth((t - 1) as usize).map(|b| b.to_f64()).unwrap_or(1.0),
    })
}

/// `beta_{t+1}^2 - beta_{t+1} - beta_t^2` for `t = 1..=horizon`.
pub fn beta_recursion_residuals(variant: BetaVariant, horizon: u64) -> Vec<f64> {
    let mut seq = BetaSequence::new(variant);
    let mut prev = seq.next().unwrap_or(DoubleDouble::ONE);
    (0..horizon)
        .map(|_| {
            let next = seq.next().unwrap_or(DoubleDouble::ONE);
            let r = next.sqr() - next - prev.sqr();
            prev = next;
            r.to_f64()
        })
        .collect()
}

fn ln_power(x: DoubleDouble, p: f64) -> DoubleDouble {
    let l = x.ln();
    if p.fract() == 0.0 && (0.0..=16.0).contains(&p) {
        l.powi(p as u32)
    } else {
        l.powf(DoubleDouble::new(p))
    }
}

/// `N0 * floor((t + 2 + delta)^3 ln(t + 2 + delta)^(1 + 2b))`.
pub fn smooth_batch(t: u64, n0: u64, b: f64, delta: f64) -> Result<u64> {
    at_least_one("t", t)?;
    at_least_one("N0", n0)?;
    positive("b", b)?;
    nonnegative("delta", delta)?;
    let x = DoubleDouble::new(t as f64) + DoubleDouble::new(2.0) + DoubleDouble::new(delta);
    let v = x.powi(3) * ln_power(x, 1.0 + 2.0 * b);
    batch_from(v, n0)
}

/// `N0 * floor(zeta^(-t))`.
pub fn strong_batch(t: u64, n0: u64, zeta: f64) -> Result<u64> {
    at_least_one("t", t)?;
    at_least_one("N0", n0)?;
    in_open_unit("zeta", zeta)?;
    let v = (DoubleDouble::new(-(t as f64)) * DoubleDouble::new(zeta).ln()).exp();
    batch_from(v, n0)
}

fn batch_from(v: DoubleDouble, n0: u64) -> Result<u64> {
    let f = v.floor();
    if !(f < 9.0e18) {
        return Err(Error::param("N_t", format!("batch size overflows ({:e})", v.to_f64())));
    }
    (f as u64)
        .max(1)
        .checked_mul(n0)
        .ok_or_else(|| Error::param("N_t", "batch size overflows"))
}

/// `ceil(exp((15 s^2 / (8 phi N0 b))^(1/(2b))) - 1 - delta) v 1` with `s = alpha_1 sigma_L`.
pub fn t0_smooth(phi: f64, n0: u64, b: f64, delta: f64, alpha1_sigma_l: f64) -> Result<u64> {
    in_open_unit("phi", phi)?;
    at_least_one("N0", n0)?;
    positive("b", b)?;
    nonnegative("delta", delta)?;
    nonnegative("alpha1_sigma_L", alpha1_sigma_l)?;
    let inner = 15.0 * alpha1_sigma_l * alpha1_sigma_l / (8.0 * phi * n0 as f64 * b);
    let expo = inner.powf(1.0 / (2.0 * b));
    if expo > 700.0 {
        return Err(Error::param("t0", format!("threshold iteration overflows (exponent {expo})")));
    }
    clamp_to_count(ceil_snapped(expo.exp() - 1.0 - delta))
}

/// `ceil(log_{1/zeta}(2 mu^2 sigma_L^2 / ((1 - mu) phi N0 L^2))) v 1`.
pub fn t0_strong(mu: f64, phi: f64, zeta: f64, n0: u64, sigma_l: f64, l: f64) -> Result<u64> {
    in_open_unit("mu", mu)?;
    positive("phi", phi)?;
    in_open_unit("zeta", zeta)?;
    at_least_one("N0", n0)?;
    nonnegative("sigma_L", sigma_l)?;
    positive("L", l)?;
    let arg = 2.0 * mu * mu * sigma_l * sigma_l / ((1.0 - mu) * phi * n0 as f64 * l * l);
    if arg <= 1.0 {
        return Ok(1);
    }
    clamp_to_count(ceil_snapped(arg.ln() / (1.0 / zeta).ln()))
}

fn check_phi_strong(mu: f64, c: f64, l: f64, phi: f64) -> Result<f64> {
    in_open_unit("mu", mu)?;
    positive("c", c)?;
    positive("L", l)?;
    if c > l {
        return Err(Error::param("c", format!("must not exceed L ({c} > {l})")));
    }
    let half = mu * c / (2.0 * l);
    if !(phi > 0.0 && phi < half) {
        return Err(Error::param("phi", format!("must lie in (0, mu c / (2L)) = (0, {half}), got {phi}")));
    }
    Ok(half)
}

/// `max(1 - mu c / (2L) + phi, zeta)`.
pub fn contraction_rho(mu: f64, c: f64, l: f64, phi: f64, zeta: f64) -> Result<f64> {
    let half = check_phi_strong(mu, c, l, phi)?;
    in_open_unit("zeta", zeta)?;
    Ok((1.0 - half + phi).max(zeta))
}

/// Largest `a` for which `1 - a (mu c / (2L) + phi)` still dominates `1 - mu c / (2L) + phi`.
pub fn admissible_a_frac(mu: f64, c: f64, l: f64, phi: f64) -> Result<f64> {
    let half = check_phi_strong(mu, c, l, phi)?;
    Ok((half - phi) / (half + phi))
}

/// `zeta = 1 - a (mu c / (2L) + phi)`, rejected unless it attains the contraction factor.
pub fn matched_zeta(mu: f64, c: f64, l: f64, phi: f64, a_frac: f64) -> Result<f64> {
    let half = check_phi_strong(mu, c, l, phi)?;
    if !(a_frac > 0.0 && a_frac <= 1.0) {
        return Err(Error::param("a_frac", format!("must lie in (0, 1], got {a_frac}")));
    }
    let zeta = 1.0 - a_frac * (half + phi);
    let floor = 1.0 - half + phi;
    if zeta < floor {
        return Err(Error::param(
            "a_frac",
            format!(
                "zeta = {zeta} falls below 1 - mu c/(2L) + phi = {floor}; the largest admissible a_frac is {}",
                (half - phi) / (half + phi)
            ),
        ));
    }
    Ok(zeta)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothPolicy {
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub n0: u64,
    pub l: f64,
    pub beta_variant: BetaVariant,
}

impl SmoothPolicy {
    pub fn new(mu: f64, a: f64, b: f64, delta: f64, n0: u64, l: f64, beta_variant: BetaVariant) -> Result<Self> {
        in_open_unit("mu", mu)?;
        positive("a", a)?;
        positive("b", b)?;
        nonnegative("delta", delta)?;
        at_least_one("N0", n0)?;
        positive("L", l)?;
        Ok(SmoothPolicy { mu, a, b, delta, n0, l, beta_variant })
    }

    /// `mu / (L + a / sqrt(N0))`
    pub fn alpha(&self) -> f64 {
        self.mu / (self.l + self.a / (self.n0 as f64).sqrt())
    }

    pub fn beta(&self, t: u64) -> Result<f64> {
        fista_beta(t, self.beta_variant)
    }

    pub fn betas(&self) -> impl Iterator<Item = f64> {
        BetaSequence::new(self.beta_variant).map(|b| b.to_f64())
    }

    pub fn batch(&self, t: u64) -> Result<u64> {
        smooth_batch(t, self.n0, self.b, self.delta)
    }

    /// Threshold iteration for tail mass `phi / (15 sigma_L^2)`, with the
    /// `1 / (1 - L alpha)` factor of the tail sum folded into the argument.
    pub fn t0(&self, sigma_l: f64, phi: f64) -> Result<u64> {
        let alpha = self.alpha();
        t0_smooth(phi, self.n0, self.b, self.delta, alpha * sigma_l / (1.0 - self.l * alpha).sqrt())
    }

    /// Upper bound on `sum_{t >= t0} alpha^2 beta_{t+1}^2 / ((1 - L alpha) N_{t+1})`:
    /// summed to `horizon`, then closed with an integral bound on the remainder.
    pub fn tail_sum(&self, t0: u64, horizon: u64) -> f64 {
        let alpha = self.alpha();
        let k = alpha * alpha / (1.0 - self.l * alpha);
        let p = 1.0 + 2.0 * self.b;
        let n0 = self.n0 as f64;
        let mut s = crate::numeric::NeumaierSum::new();
        for t in t0..=horizon.max(t0) {
            let beta = (t as f64 + 2.0) / 2.0;
            let x = t as f64 + 3.0 + self.delta;
            let v = x * x * x * x.ln().powf(p);
            s.add(k * beta * beta / (n0 * (v * (1.0 - 1e-13) - 1.0).max(1.0)));
        }
        let x = horizon.max(t0) as f64 + 3.0 + self.delta;
        let remainder = k / (4.0 * n0) * (1.0 + 1e-6) / (2.0 * self.b * x.ln().powf(2.0 * self.b));
        s.value() + remainder
    }

    /// `sum_{tau <= t} N_tau`
    pub fn cumulative_calls(&self, t: u64) -> Result<u128> {
        let mut total: u128 = 0;
        for tau in 1..=t {
            total += u128::from(self.batch(tau)?);
        }
        Ok(total)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongPolicy {
    pub mu: f64,
    pub zeta: f64,
    pub n0: u64,
    pub phi: f64,
    pub l: f64,
    pub c: f64,
}

impl StrongPolicy {
    pub fn new(mu: f64, zeta: f64, n0: u64, phi: f64, l: f64, c: f64) -> Result<Self> {
        check_phi_strong(mu, c, l, phi)?;
        in_open_unit("zeta", zeta)?;
        at_least_one("N0", n0)?;
        Ok(StrongPolicy { mu, zeta, n0, phi, l, c })
    }

    /// Policy with `zeta` from [`matched_zeta`].
    pub fn matched(mu: f64, n0: u64, phi: f64, a_frac: f64, l: f64, c: f64) -> Result<Self> {
        let zeta = matched_zeta(mu, c, l, phi, a_frac)?;
        Self::new(mu, zeta, n0, phi, l, c)
    }

    /// `mu / L`
    pub fn alpha(&self) -> f64 {
        self.mu / self.l
    }

    pub fn batch(&self, t: u64) -> Result<u64> {
        strong_batch(t, self.n0, self.zeta)
    }

    pub fn rho(&self) -> f64 {
        (1.0 - self.mu * self.c / (2.0 * self.l) + self.phi).max(self.zeta)
    }

    /// `1 - c alpha`
    pub fn lambda(&self) -> f64 {
        1.0 - self.c * self.alpha()
    }

    /// `2 (alpha sigma_L)^2 / ((1 - L alpha) N0)`
    pub fn delta_aux(&self, sigma_l: f64) -> f64 {
        let a = self.alpha();
        2.0 * (a * sigma_l).powi(2) / ((1.0 - self.l * a) * self.n0 as f64)
    }

    /// `2 alpha^2 sigma(x*)^2 / ((1 - L alpha) N0)`
    pub fn beta_aux(&self, sigma_star: f64) -> f64 {
        let a = self.alpha();
        2.0 * a * a * sigma_star * sigma_star / ((1.0 - self.l * a) * self.n0 as f64)
    }

    pub fn t0(&self, sigma_l: f64) -> Result<u64> {
        t0_strong(self.mu, self.phi, self.zeta, self.n0, sigma_l, self.l)
    }

    pub fn cumulative_calls(&self, t: u64) -> Result<u128> {
        let mut total: u128 = 0;
        for tau in 1..=t {
            total += u128::from(self.batch(tau)?);
        }
        Ok(total)
    }
}

/// Evaluated theoretical quantities for auditing a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub t0: u64,
    pub rho: Option<f64>,
    pub j: Option<f64>,
    pub c: Option<f64>,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub gamma: Option<f64>,
    pub q: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Inputs {
    pub gap1: f64,
    pub s1_dist_sq: f64,
    pub sigma_star: f64,
    pub sigma_l: f64,
    pub j: f64,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub n0: u64,
    pub l: f64,
}

/// Bound on `E[g(z^{t+1}) - g*]` for the accelerated method.
pub fn theorem1_bound(t: u64, p: &Theorem1Inputs) -> Result<f64> {
    at_least_one("t", t)?;
    nonnegative("gap1", p.gap1)?;
    nonnegative("s1_dist_sq", p.s1_dist_sq)?;
    nonnegative("sigma_star", p.sigma_star)?;
    nonnegative("sigma_L", p.sigma_l)?;
    nonnegative("J", p.j)?;
    in_open_unit("mu", p.mu)?;
    positive("a", p.a)?;
    positive("b", p.b)?;
    nonnegative("delta", p.delta)?;
    at_least_one("N0", p.n0)?;
    positive("L", p.l)?;
    let n0 = p.n0 as f64;
    let big_a = p.l / p.mu + p.a / (p.mu * n0.sqrt());
    let lnb = (2.0 + p.delta).ln().powf(2.0 * p.b);
    let denom = (t as f64 + 2.0).powi(2);
    let t1 = 4.0 * p.gap1;
    let t2 = 2.0 * big_a * p.s1_dist_sq;
    let t3 = big_a * 3.0 * p.mu * p.mu / (4.0 * (1.0 - p.mu) * p.a * p.a * p.b * lnb) * p.sigma_star * p.sigma_star;
    let t4 = big_a * 15.0 * p.mu * p.mu / (4.0 * (1.0 - p.mu) * n0 * p.b * lnb) * (p.sigma_l / p.l).powi(2) * p.j;
    Ok((t1 + t2 + t3 + t4) / denom)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prop2Inputs {
    pub alpha_t0: f64,
    pub beta_t0: f64,
    pub gaps_upto_t0: Vec<f64>,
    pub s_t0_dist_sq: f64,
    pub sigma_star: f64,
    pub sigma_l: f64,
    pub gamma: f64,
}

/// Bound on `sup_t E|z^t - x*|^2` for the accelerated method. Without
/// multiplicative noise the quotient degenerates; the additive tail
/// `3 gamma sigma(x*)^2` then replaces it.
pub fn prop2_bound(p: &Prop2Inputs) -> Result<f64> {
    positive("alpha_t0", p.alpha_t0)?;
    if !(p.beta_t0 >= 1.0) {
        return Err(Error::param("beta_t0", format!("must be at least 1, got {}", p.beta_t0)));
    }
    nonnegative("s_t0_dist_sq", p.s_t0_dist_sq)?;
    nonnegative("sigma_star", p.sigma_star)?;
    nonnegative("sigma_L", p.sigma_l)?;
    nonnegative("gamma", p.gamma)?;
    let max_gap = p.gaps_upto_t0.iter().copied().fold(0.0, f64::max);
    let numerator = 2.0 * p.alpha_t0 * p.beta_t0 * p.beta_t0 * max_gap + p.s_t0_dist_sq;
    if p.sigma_l == 0.0 {
        return Ok(numerator + 3.0 * p.gamma * p.sigma_star * p.sigma_star);
    }
    let s2 = p.sigma_l * p.sigma_l;
    if p.gamma >= 1.0 / (15.0 * s2) {
        return Err(Error::param("gamma", format!("must be below 1/(15 sigma_L^2) = {}, got {}", 1.0 / (15.0 * s2), p.gamma)));
    }
    Ok((numerator + p.sigma_star * p.sigma_star / (3.0 * s2)) / (1.0 - 15.0 * p.gamma * s2))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem2Inputs {
    pub x1_dist_sq: f64,
    pub max_dist_sq_before_t0: f64,
    pub dist_sq_at_t0: f64,
    pub mu: f64,
    pub c: f64,
    pub l: f64,
    pub n0: u64,
    pub sigma_star: f64,
    pub sigma_l: f64,
    pub phi: f64,
    pub t0: u64,
}

/// Constants `C`, `C0`, `C1` and `Q` of the linear-rate bound.
pub fn theorem2_constants(p: &Theorem2Inputs) -> Result<BoundReport> {
    in_open_unit("mu", p.mu)?;
    positive("c", p.c)?;
    positive("L", p.l)?;
    at_least_one("N0", p.n0)?;
    at_least_one("t0", p.t0)?;
    nonnegative("x1_dist_sq", p.x1_dist_sq)?;
    nonnegative("max_dist_sq_before_t0", p.max_dist_sq_before_t0)?;
    nonnegative("dist_sq_at_t0", p.dist_sq_at_t0)?;
    nonnegative("sigma_star", p.sigma_star)?;
    nonnegative("sigma_L", p.sigma_l)?;
    positive("phi", p.phi)?;
    let ratio = p.mu * p.c / p.l;
    if ratio >= 1.0 {
        return Err(Error::param("mu", format!("mu c / L must be below 1, got {ratio}")));
    }
    let lambda = 1.0 - ratio;
    let maxpre = if p.t0 == 1 { 0.0 } else { p.max_dist_sq_before_t0 };
    let k = 4.0 * p.mu / ((1.0 - p.mu) * p.n0 as f64 * p.l * p.c);
    let s2 = p.sigma_star * p.sigma_star;
    let q = p.sigma_l * p.sigma_l * maxpre;
    let c = p.x1_dist_sq / lambda + k * (q + 2.0 * s2);
    let c0 = (lambda + p.phi).powf(-(p.t0 as f64)) * p.dist_sq_at_t0 + k * s2;
    let c1 = p.x1_dist_sq / lambda + k * q + k * s2;
    Ok(BoundReport { t0: p.t0, rho: None, j: None, c: Some(c), c0: Some(c0), c1: Some(c1), gamma: None, q: Some(q) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_examples() {
        assert_eq!(fista_beta(1, BetaVariant::Linear).unwrap(), 1.0);
        assert_eq!(fista_beta(3, BetaVariant::Linear).unwrap(), 2.0);
        assert_eq!(fista_beta(7, BetaVariant::Linear).unwrap(), 4.0);
        assert_eq!(fista_beta(1, BetaVariant::Exact).unwrap(), 1.0);
        assert!((fista_beta(2, BetaVariant::Exact).unwrap() - 1.618_033_988_749_895).abs() < 1e-15);
        assert!(fista_beta(0, BetaVariant::Linear).is_err());
    }

    #[test]
    fn beta_residuals() {
        assert!(beta_recursion_residuals(BetaVariant::Linear, 1000).iter().all(|r| *r == -0.25));
        assert!(beta_recursion_residuals(BetaVariant::Exact, 1000).iter().all(|r| r.abs() <= 1e-12));
    }

    #[test]
    fn smooth_batch_examples() {
        assert_eq!(smooth_batch(1, 2, 0.5, 0.0).unwrap(), 64);
        assert_eq!(smooth_batch(2, 1, 0.5, 0.0).unwrap(), 122);
        let mut prev = 0;
        for t in 1..=10_000 {
            let n = smooth_batch(t, 3, 0.7, 1.5).unwrap();
            assert!(n >= prev && n >= 3);
            prev = n;
        }
        assert!(smooth_batch(1, 0, 0.5, 0.0).is_err());
        assert!(smooth_batch(1, 1, 0.0, 0.0).is_err());
    }

    #[test]
    fn strong_batch_examples() {
        assert_eq!(strong_batch(1, 1, 0.5).unwrap(), 2);
        assert_eq!(strong_batch(10, 3, 0.5).unwrap(), 3 * 1024);
        assert_eq!(strong_batch(3, 1, 0.9).unwrap(), 1);
        assert!(strong_batch(1000, 1, 0.5).is_err());
    }

    #[test]
    fn t0_examples() {
        assert_eq!(t0_smooth(0.5, 2, 0.5, 0.0, 1.0).unwrap(), 42);
        assert_eq!(t0_smooth(0.5, 2, 0.5, 44.0, 1.0).unwrap(), 1);
        assert_eq!(t0_smooth(0.5, 2, 0.5, 0.0, 0.0).unwrap(), 1);
        // argument e^2 with zeta = 1/e: 2 mu^2 s^2 / ((1 - mu) phi) = e^2
        let mu = 0.5;
        let phi = 0.01;
        let s2 = std::f64::consts::E.powi(2) * (1.0 - mu) * phi / (2.0 * mu * mu);
        assert_eq!(t0_strong(mu, phi, (-1.0f64).exp(), 1, s2.sqrt(), 1.0).unwrap(), 2);
        assert_eq!(t0_strong(0.5, 0.01, 0.5, 1, 0.0, 1.0).unwrap(), 1);
        assert_eq!(t0_strong(0.5, 0.01, 0.5, 1, 2.0, 1.0).unwrap(), 9);
    }

    #[test]
    fn rho_and_zeta_examples() {
        assert!((contraction_rho(0.5, 0.2, 1.0, 0.02, 0.9).unwrap() - 0.97).abs() < 1e-15);
        assert_eq!(contraction_rho(0.5, 0.2, 1.0, 0.02, 0.99).unwrap(), 0.99);
        assert!(contraction_rho(0.5, 0.2, 1.0, 0.05, 0.9).is_err());
        let z = matched_zeta(0.5, 0.2, 1.0, 0.02, 0.4).unwrap();
        assert!((z - 0.972).abs() < 1e-15);
        assert_eq!(contraction_rho(0.5, 0.2, 1.0, 0.02, z).unwrap(), z);
        assert!(matched_zeta(0.5, 0.2, 1.0, 0.02, 1.0).is_err());
        assert!((admissible_a_frac(0.5, 0.2, 1.0, 0.02).unwrap() - 0.03 / 0.07).abs() < 1e-15);
    }

    #[test]
    fn theorem1_noise_free_reduction_and_scaling() {
        let mut p = Theorem1Inputs {
            gap1: 1.5,
            s1_dist_sq: 2.0,
            sigma_star: 0.0,
            sigma_l: 0.0,
            j: 3.0,
            mu: 0.5,
            a: 1.0,
            b: 0.5,
            delta: 44.0,
            n0: 2,
            l: 1.0,
        };
        let want = (4.0 * 1.5 + 2.0 * (2.0 + 1.0 / (0.5 * 2f64.sqrt())) * 2.0) / 144.0;
        assert!((theorem1_bound(10, &p).unwrap() - want).abs() < 1e-15);
        p.sigma_star = 1.0;
        p.sigma_l = 1.0;
        let ratio = theorem1_bound(1_000_000, &p).unwrap() / theorem1_bound(1, &p).unwrap();
        assert!((ratio - (3.0f64 / 1_000_002.0).powi(2)).abs() <= 1e-12 * ratio);
    }

    #[test]
    fn prop2_examples() {
        let base = Prop2Inputs {
            alpha_t0: 0.3,
            beta_t0: 1.0,
            gaps_upto_t0: vec![0.0],
            s_t0_dist_sq: 0.0,
            sigma_star: 1.0,
            sigma_l: 1.0,
            gamma: 1.0 / 30.0,
        };
        assert!((prop2_bound(&base).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let over = Prop2Inputs { gamma: 1.0 / 15.0, ..base.clone() };
        assert!(prop2_bound(&over).is_err());
        let flat = Prop2Inputs { sigma_l: 0.0, sigma_star: 0.0, gaps_upto_t0: vec![1.0, 2.0], s_t0_dist_sq: 0.5, ..base };
        assert_eq!(prop2_bound(&flat).unwrap(), 2.0 * 0.3 * 2.0 + 0.5);
    }

    #[test]
    fn theorem2_examples() {
        let p = Theorem2Inputs {
            x1_dist_sq: 2.0,
            max_dist_sq_before_t0: 5.0,
            dist_sq_at_t0: 1.0,
            mu: 0.5,
            c: 0.2,
            l: 1.0,
            n0: 1,
            sigma_star: 0.0,
            sigma_l: 0.0,
            phi: 0.02,
            t0: 3,
        };
        let r = theorem2_constants(&p).unwrap();
        assert_eq!(r.c.unwrap(), 2.0 / 0.9);
        let r = theorem2_constants(&Theorem2Inputs { t0: 1, sigma_l: 1.0, ..p }).unwrap();
        assert_eq!(r.q, Some(0.0));
        assert_eq!(r.c.unwrap(), 2.0 / 0.9);
    }
}
