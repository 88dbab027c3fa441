//! Reproducible parallel Monte Carlo.
//!
//! Work is cut into fixed-size chunks. Chunk `i` draws from a ChaCha8 stream
//! seeded with the run seed and switched to stream number `i`, so every
//! sample is a pure function of `(seed, chunk_size, sample index)`. Chunk
//! statistics are merged in chunk order, which makes the result bit-identical
//! for any number of worker threads. Normal variates use the ziggurat sampler
//! of `rand_distr::StandardNormal`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::quadrature::EstimateWithError;

/// Random stream handed to samplers.
pub type Stream = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MCConfig {
    pub samples: u64,
    pub seed: u64,
    pub chunk_size: u64,
}

impl Default for MCConfig {
    fn default() -> Self {
        MCConfig {
            samples: 10_000_000,
            seed: 42,
            chunk_size: 1 << 16,
        }
    }
}

impl MCConfig {
    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return domain("Monte Carlo needs at least one sample");
        }
        if self.chunk_size == 0 {
            return domain("chunk_size must be >= 1");
        }
        Ok(())
    }

    fn chunks(&self) -> impl IndexedParallelIterator<Item = (u64, u64)> + '_ {
        let n = self.samples.div_ceil(self.chunk_size) as usize;
        (0..n).into_par_iter().map(move |i| {
            let i = i as u64;
            let start = i * self.chunk_size;
            (i, (self.samples - start).min(self.chunk_size))
        })
    }
}

/// Stream for chunk `index` of a run seeded with `seed`.
pub fn chunk_stream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Streaming mean / sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Pairwise combination of two disjoint sample sets.
    pub fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let n = self.count + other.count;
        let (na, nb) = (self.count as f64, other.count as f64);
        let delta = other.mean - self.mean;
        Moments {
            count: n,
            mean: self.mean + delta * nb / n as f64,
            m2: self.m2 + other.m2 + delta * delta * na * nb / n as f64,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Mean with one standard error.
    pub fn estimate(&self) -> EstimateWithError {
        let se = if self.count < 2 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        };
        EstimateWithError::new(self.mean, se)
    }
}

/// Sample mean of `sampler` with its standard error.
pub fn estimate_mean<F>(sampler: F, cfg: &MCConfig) -> Result<EstimateWithError>
where
    F: Fn(&mut Stream) -> f64 + Sync,
{
    cfg.validate()?;
    let parts: Vec<Moments> = cfg
        .chunks()
        .map(|(i, n)| {
            let mut rng = chunk_stream(cfg.seed, i);
            let mut m = Moments::default();
            for _ in 0..n {
                m.push(sampler(&mut rng));
            }
            m
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    Ok(total.estimate())
}

/// Every sampled value, in sample order. Used where one fixed sample must be
/// reused across many evaluations (common random numbers).
pub fn collect_samples<F>(sampler: F, cfg: &MCConfig) -> Result<Vec<f64>>
where
    F: Fn(&mut Stream) -> f64 + Sync,
{
    cfg.validate()?;
    let parts: Vec<Vec<f64>> = cfg
        .chunks()
        .map(|(i, n)| {
            let mut rng = chunk_stream(cfg.seed, i);
            (0..n).map(|_| sampler(&mut rng)).collect()
        })
        .collect();
    Ok(parts.concat())
}

/// `d` iid standard normal variates.
pub fn gaussian_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

/// Overwrites `out` with iid standard normal variates.
pub fn fill_gaussian<R: Rng + ?Sized>(out: &mut [f64], rng: &mut R) {
    for x in out.iter_mut() {
        *x = rng.sample(StandardNormal);
    }
}
