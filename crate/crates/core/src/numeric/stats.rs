//! Compensated sums and streaming moments.

use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Streaming count, mean and sum of squared deviations (Welford update,
/// Chan merge) with compensated accumulation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MomentAccumulator {
    count: u64,
    mean: NeumaierSum,
    m2: NeumaierSum,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean.value();
        self.mean.add(delta / self.count as f64);
        self.m2.add(delta * (x - self.mean.value()));
    }

    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let delta = other.mean() - self.mean();
        let mut mean = self.mean;
        mean.add(delta * nb / n);
        let mut m2 = self.m2;
        m2.add(other.m2.value());
        m2.add(delta * delta * na * nb / n);
        MomentAccumulator { count: self.count + other.count, mean, m2 }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean.value()
    }

    /// Unbiased sample variance; 0 for fewer than two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2.value() / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

impl Extend<f64> for MomentAccumulator {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

/// Mean and standard error (sample sd over sqrt(count)).
pub fn moments(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyInput("moments needs at least one value"));
    }
    let mut acc = MomentAccumulator::new();
    acc.extend(values.iter().copied());
    Ok((acc.mean(), acc.std_error()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spec_examples() {
        assert_eq!(moments(&[1.0, 1.0, 1.0]).unwrap(), (1.0, 0.0));
        let (m, se) = moments(&[0.0, 2.0]).unwrap();
        assert_eq!(m, 1.0);
        assert!((se - 1.0).abs() < 1e-15);
        assert!(moments(&[]).is_err());
        assert_eq!(moments(&[4.5]).unwrap(), (4.5, 0.0));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }

    fn acc(xs: &[f64]) -> MomentAccumulator {
        let mut a = MomentAccumulator::new();
        a.extend(xs.iter().copied());
        a
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300) + 1e-300
    }

    proptest! {
        #[test]
        fn merge_matches_concatenation(
            a in prop::collection::vec(-1e3f64..1e3, 0..40),
            b in prop::collection::vec(-1e3f64..1e3, 0..40),
            c in prop::collection::vec(-1e3f64..1e3, 0..40),
        ) {
            let all: Vec<f64> = a.iter().chain(&b).chain(&c).copied().collect();
            let whole = acc(&all);
            let left = acc(&a).merge(&acc(&b)).merge(&acc(&c));
            let right = acc(&a).merge(&acc(&b).merge(&acc(&c)));
            prop_assert_eq!(left.count(), whole.count());
            let scale = all.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            for m in [&left, &right] {
                prop_assert!((m.mean() - whole.mean()).abs() <= 1e-12 * scale);
                prop_assert!(close(m.variance(), whole.variance()) || (m.variance() - whole.variance()).abs() <= 1e-12 * scale * scale);
            }
        }
    }
}
