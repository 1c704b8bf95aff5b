//! Deterministic parallel Monte Carlo driver.
//!
//! Samples are split into fixed-size chunks; chunk k draws from a ChaCha8
//! stream seeded with `seed` and stream id k. Per-chunk statistics are
//! merged in chunk order, so results depend only on (seed, samples,
//! chunk size) and not on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Samples per independently seeded stream.
pub const DEFAULT_CHUNK: usize = 1 << 15;

/// Running mean and second central moment (Chan et al. merge rule).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl RunningStats {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(self, other: Self) -> Self {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Self { count, mean, m2 }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    /// Sample standard deviation over √n.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// RNG for chunk `k` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

/// Runs `samples` evaluations of `draw` in parallel chunks.
///
/// `init` builds per-chunk scratch space that `draw` may reuse between
/// samples.
pub fn sample_mean<S, I, F>(samples: usize, seed: u64, chunk: usize, init: I, draw: F) -> Result<RunningStats>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut ChaCha8Rng, &mut S) -> Result<f64> + Sync,
{
    if samples == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least one sample".into()));
    }
    let chunk = chunk.max(1);
    let chunks = samples.div_ceil(chunk);
    let partial = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let mut scratch = init();
            let n = chunk.min(samples - k * chunk);
            let mut stats = RunningStats::default();
            for _ in 0..n {
                stats.push(draw(&mut rng, &mut scratch)?);
            }
            Ok(stats)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(partial.into_iter().fold(RunningStats::default(), RunningStats::merge))
}
