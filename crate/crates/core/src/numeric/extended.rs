//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! carrying about 106 bits of significand. Used where a floor or a
//! recursion residual must be exact beyond plain `f64` precision.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

const LN2: DoubleDouble = DoubleDouble { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = DoubleDouble { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    fn ldexp(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        DoubleDouble { hi: self.hi * f, lo: self.lo * f }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::ZERO;
        }
        let q = DoubleDouble::new(self.hi.sqrt());
        q + (self - q.sqr()) / (q * DoubleDouble::new(2.0))
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return DoubleDouble::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return DoubleDouble::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * DoubleDouble::new(k)).ldexp(-10);
        // expm1(r) by Taylor series; |r| < 4e-4 so 12 terms reach 1e-40.
        let mut term = r;
        let mut sum = r;
        for n in 2..=12 {
            term = term * r / DoubleDouble::new(n as f64);
            sum = sum + term;
        }
        for _ in 0..10 {
            sum = sum * DoubleDouble::new(2.0) + sum.sqr();
        }
        (sum + DoubleDouble::ONE).ldexp(k as i32)
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::new(if self.hi == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
        }
        let mut y = DoubleDouble::new(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - DoubleDouble::ONE;
        }
        y
    }

    pub fn powf(self, p: Self) -> Self {
        (p * self.ln()).exp()
    }

    pub fn powi(self, n: u32) -> Self {
        let mut acc = DoubleDouble::ONE;
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }

    /// Largest integer not above the represented value.
    pub fn floor(self) -> f64 {
        let f = self.hi.floor();
        if f == self.hi {
            f + (self.lo.floor())
        } else {
            f
        }
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble::new(x)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * DoubleDouble::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * DoubleDouble::new(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::new(q3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(x: f64) -> DoubleDouble {
        DoubleDouble::new(x)
    }

    #[test]
    fn exp_ln_roundtrip() {
        for &x in &[1e-8, 0.3, 1.0, 2.0, 3.75, 10.0, 123.456, 1e6] {
            let back = dd(x).ln().exp();
            assert!(((back - dd(x)) / dd(x)).to_f64().abs() < 1e-29, "x={x}");
        }
        for &x in &[-20.0, -1.0, 0.5, 3.75, 50.0] {
            let back = dd(x).exp().ln();
            assert!((back - dd(x)).to_f64().abs() < 1e-29 * x.abs().max(1.0), "x={x}");
        }
    }

    #[test]
    fn known_constants() {
        let e = dd(1.0).exp();
        assert_eq!(e.hi, std::f64::consts::E);
        // e = 2.718281828459045 + 1.4456468917292502e-16
        assert!((e.lo - 1.445_646_891_729_250_2e-16).abs() < 1e-31);
        let ln3 = dd(3.0).ln();
        assert_eq!(ln3.hi, 3f64.ln());
        let two = dd(2.0).sqrt().sqr();
        assert!((two - dd(2.0)).to_f64().abs() < 1e-31);
    }

    #[test]
    fn floor_uses_low_word() {
        assert_eq!(DoubleDouble { hi: 5.0, lo: -1e-20 }.floor(), 4.0);
        assert_eq!(DoubleDouble { hi: 5.0, lo: 1e-20 }.floor(), 5.0);
        assert_eq!(dd(32.587).floor(), 32.0);
        assert_eq!(dd(-0.5).floor(), -1.0);
    }

    #[test]
    fn division_and_products_are_tight() {
        let third = dd(1.0) / dd(3.0);
        let back = third * dd(3.0) - dd(1.0);
        assert!(back.to_f64().abs() < 1e-31);
        assert_eq!(dd(1.5).powi(3).to_f64(), 3.375);
        let p = dd(9.0).powf(dd(0.5));
        assert!((p - dd(3.0)).to_f64().abs() < 1e-30);
    }
}
