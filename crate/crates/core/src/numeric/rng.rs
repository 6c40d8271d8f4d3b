//! Splittable deterministic random streams.
//!
//! A stream is named by a seed and a path of 32-bit ids. The pair is hashed
//! into a ChaCha8 key, so any stream can be materialized directly from its
//! name without touching its parent or siblings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type StreamRng = ChaCha8Rng;

/// Tags appended to a stream path to separate independent uses.
pub mod purpose {
    pub const BATCH: u32 = 0x6261_7463;
    pub const PROBLEM: u32 = 0x7072_6f62;
    pub const ROTATION: u32 = 0x726f_7461;
    pub const ESTIMATE: u32 = 0x6573_7469;
    pub const VERIFY: u32 = 0x7665_7269;
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    seed: u64,
    path: Vec<u32>,
}

pub fn make_stream(seed: u64, path: &[u32]) -> RngStream {
    RngStream { seed, path: path.to_vec() }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        make_stream(seed, &[])
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> &[u32] {
        &self.path
    }

    pub fn child(&self, id: u32) -> Self {
        let mut path = self.path.clone();
        path.push(id);
        RngStream { seed: self.seed, path }
    }

    pub fn key(&self) -> [u8; 32] {
        let mut h = splitmix64(self.seed ^ 0x5eed_0f5e_ed5e_ed00);
        for &id in &self.path {
            h = splitmix64(h ^ (u64::from(id) | 0x1_0000_0000));
        }
        h = splitmix64(h ^ self.path.len() as u64);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            h = splitmix64(h);
            chunk.copy_from_slice(&h.to_le_bytes());
        }
        key
    }

    pub fn rng(&self) -> StreamRng {
        ChaCha8Rng::from_seed(self.key())
    }
}

pub fn standard_normal(rng: &mut StreamRng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn fill_standard_normal(rng: &mut StreamRng, out: &mut [f64]) {
    for v in out {
        *v = rng.sample(StandardNormal);
    }
}

/// Draws a vector with independent `Normal(mean_i, stddev^2)` entries.
pub fn gaussian_vector(stream: &RngStream, d: usize, mean: &[f64], stddev: f64) -> Result<Vec<f64>> {
    if mean.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: mean.len() });
    }
    if !(stddev >= 0.0) || !stddev.is_finite() {
        return Err(Error::param("stddev", format!("must be finite and nonnegative, got {stddev}")));
    }
    if stddev == 0.0 {
        return Ok(mean.to_vec());
    }
    let mut rng = stream.rng();
    Ok(mean.iter().map(|m| m + stddev * standard_normal(&mut rng)).collect())
}
