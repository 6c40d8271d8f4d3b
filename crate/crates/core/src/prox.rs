//! Regularizers, feasible sets and the prox-mapping
//! `argmin_{x in X} <u, x - y> + |x - y|^2 / (2 alpha) + phi(x)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::vector::{self, check_dim};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegularizerSpec {
    Zero,
    /// `lambda * |x|_1`
    L1 { lambda: f64 },
    /// `lambda * |x|^2`
    SquaredL2 { lambda: f64 },
    /// `lambda * |x|^2 + gamma * |x|_1`
    ElasticNet { lambda: f64, gamma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintSpec {
    AllSpace,
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl fmt::Display for RegularizerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for ConstraintSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl RegularizerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            RegularizerSpec::Zero => "zero",
            RegularizerSpec::L1 { .. } => "l1",
            RegularizerSpec::SquaredL2 { .. } => "squared_l2",
            RegularizerSpec::ElasticNet { .. } => "elastic_net",
        }
    }

    /// Splits the regularizer as `quad * |x|^2 + abs * |x|_1`.
    pub fn weights(&self) -> (f64, f64) {
        match *self {
            RegularizerSpec::Zero => (0.0, 0.0),
            RegularizerSpec::L1 { lambda } => (0.0, lambda),
            RegularizerSpec::SquaredL2 { lambda } => (lambda, 0.0),
            RegularizerSpec::ElasticNet { lambda, gamma } => (lambda, gamma),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (q, a) = self.weights();
        for (name, w) in [("regularizer.lambda", q), ("regularizer.gamma", a)] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::param(name, format!("weight must be finite and nonnegative, got {w}")));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.weights() == (0.0, 0.0)
    }
}

impl ConstraintSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ConstraintSpec::AllSpace => "all_space",
            ConstraintSpec::Box { .. } => "box",
            ConstraintSpec::Ball { .. } => "ball",
        }
    }

    pub fn uniform_box(d: usize, lo: f64, hi: f64) -> Self {
        ConstraintSpec::Box { lo: vec![lo; d], hi: vec![hi; d] }
    }

    pub fn centered_ball(d: usize, radius: f64) -> Self {
        ConstraintSpec::Ball { center: vec![0.0; d], radius }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            ConstraintSpec::AllSpace => false,
            ConstraintSpec::Box { lo, hi } => lo.iter().chain(hi).all(|v| v.is_finite()),
            ConstraintSpec::Ball { .. } => true,
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            ConstraintSpec::AllSpace => Ok(()),
            ConstraintSpec::Box { lo, hi } => {
                check_dim(d, lo.len())?;
                check_dim(d, hi.len())?;
                for (l, h) in lo.iter().zip(hi) {
                    if l.is_nan() || h.is_nan() || l > h {
                        return Err(Error::param("constraint.box", format!("empty interval [{l}, {h}]")));
                    }
                }
                Ok(())
            }
            ConstraintSpec::Ball { center, radius } => {
                check_dim(d, center.len())?;
                if !(*radius >= 0.0 && radius.is_finite()) || !vector::all_finite(center) {
                    return Err(Error::param("constraint.ball", format!("radius must be finite and nonnegative, got {radius}")));
                }
                Ok(())
            }
        }
    }

    /// Distance-like measure of how far `x` lies outside the set (0 inside).
    pub fn violation(&self, x: &[f64]) -> f64 {
        match self {
            ConstraintSpec::AllSpace => 0.0,
            ConstraintSpec::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (l, h))| (l - v).max(v - h).max(0.0))
                .fold(0.0, f64::max),
            ConstraintSpec::Ball { center, radius } => (vector::dist_sq(x, center).sqrt() - radius).max(0.0),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.violation(x) <= tol
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match self {
            ConstraintSpec::AllSpace => x.to_vec(),
            ConstraintSpec::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).map(|(v, (l, h))| v.clamp(*l, *h)).collect(),
            ConstraintSpec::Ball { center, radius } => {
                let r = vector::dist_sq(x, center).sqrt();
                if r <= *radius {
                    x.to_vec()
                } else {
                    let s = radius / r;
                    x.iter().zip(center).map(|(v, c)| c + s * (v - c)).collect()
                }
            }
        }
    }
}

pub fn soft_threshold(v: f64, k: f64) -> f64 {
    if v > k {
        v - k
    } else if v < -k {
        v + k
    } else {
        0.0
    }
}

pub fn reg_value(reg: &RegularizerSpec, x: &[f64]) -> f64 {
    let (q, a) = reg.weights();
    let mut v = 0.0;
    if q != 0.0 {
        v += q * vector::norm_sq(x);
    }
    if a != 0.0 {
        v += a * vector::l1_norm(x);
    }
    v
}

pub fn supported(reg: &RegularizerSpec, cons: &ConstraintSpec) -> bool {
    match cons {
        ConstraintSpec::AllSpace | ConstraintSpec::Box { .. } => true,
        ConstraintSpec::Ball { .. } => matches!(reg, RegularizerSpec::Zero),
    }
}

pub fn check_supported(reg: &RegularizerSpec, cons: &ConstraintSpec) -> Result<()> {
    if supported(reg, cons) {
        Ok(())
    } else {
        Err(Error::Unsupported { reg: reg.name().into(), cons: cons.name().into() })
    }
}

/// Prox-mapping at `y` for the linear term `u` and stepsize `alpha`.
pub fn prox_step(reg: &RegularizerSpec, cons: &ConstraintSpec, y: &[f64], u: &[f64], alpha: f64) -> Result<Vec<f64>> {
    check_supported(reg, cons)?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::param("alpha", format!("must be positive and finite, got {alpha}")));
    }
    check_dim(y.len(), u.len())?;
    let (q, a) = reg.weights();
    let shrink = 1.0 + 2.0 * alpha * q;
    let thresh = alpha * a;
    let mut x: Vec<f64> = y
        .iter()
        .zip(u)
        .map(|(yi, ui)| {
            let v = yi - alpha * ui;
            let v = if thresh > 0.0 { soft_threshold(v, thresh) } else { v };
            if shrink != 1.0 {
                v / shrink
            } else {
                v
            }
        })
        .collect();
    match cons {
        ConstraintSpec::AllSpace => {}
        ConstraintSpec::Box { lo, hi } => {
            check_dim(y.len(), lo.len())?;
            for (xi, (l, h)) in x.iter_mut().zip(lo.iter().zip(hi)) {
                *xi = xi.clamp(*l, *h);
            }
        }
        ConstraintSpec::Ball { center, .. } => {
            check_dim(y.len(), center.len())?;
            x = cons.project(&x);
        }
    }
    Ok(x)
}
