//! Blocked, seeded Monte Carlo.
//!
//! A budget of `n` samples is cut into fixed-size blocks; block `b` draws
//! from `seed.stream(b)`. Blocks run in parallel and are merged in block
//! order, so results do not depend on the thread count.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::haar::RngSeed;

pub const BLOCK_SIZE: usize = 4096;

/// Streaming mean/variance (Welford), mergeable across blocks.
#[derive(Clone, Copy, Debug, Default)]
pub struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64) * (other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }

    pub fn estimate(&self) -> MeanEstimate {
        MeanEstimate {
            mean: self.mean,
            std_error: self.std_error(),
            samples: self.n as usize,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Runs `f(rng, start, count)` on each block and returns block results in order.
pub fn par_blocks<T, F>(n: usize, block_size: usize, seed: RngSeed, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize, usize) -> T + Sync,
{
    let block_size = block_size.max(1);
    let blocks = n.div_ceil(block_size);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * block_size;
            let count = block_size.min(n - start);
            let mut rng = seed.stream(b as u64);
            f(&mut rng, start, count)
        })
        .collect()
}

/// Mean and standard error of `sample(rng)` over `n` draws.
pub fn estimate_mean<F>(n: usize, seed: RngSeed, sample: F) -> MeanEstimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let parts = par_blocks(n, BLOCK_SIZE, seed, |rng, _, count| {
        let mut acc = Accumulator::default();
        for _ in 0..count {
            acc.push(sample(rng));
        }
        acc
    });
    let mut total = Accumulator::default();
    for p in &parts {
        total.merge(p);
    }
    total.estimate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut whole = Accumulator::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut a = Accumulator::default();
        let mut b = Accumulator::default();
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert!((a.mean() - whole.mean()).abs() < 1e-12);
        assert!((a.variance() - whole.variance()).abs() < 1e-9);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let run = || estimate_mean(20_000, RngSeed(4), |rng| rng.random::<f64>());
        let a = run();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(run);
        assert_eq!(a, b);
        assert!((a.mean - 0.5).abs() < 4.0 * a.std_error);
    }
}
