//! Seeded, batch-parallel Monte-Carlo driver. Batch `b` always uses stream
//! `b` of the master seed, so results do not depend on the worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::scalar::pairwise_sum;

pub(crate) const BATCH: usize = 4096;

/// Runs `f(rng, len)` for every batch and returns the outputs in batch order.
pub(crate) fn run_batches<R, F>(samples: usize, seed: u64, f: F) -> Vec<Vec<R>>
where
    R: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> Vec<R> + Sync,
{
    let batches = samples.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let len = BATCH.min(samples - b * BATCH);
            f(&mut rng, len)
        })
        .collect()
}

/// Mean and standard error of the mean.
pub(crate) fn mean_and_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = pairwise_sum(values) / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
