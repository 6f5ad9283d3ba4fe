//! Empirical `phi_n` from sampled orbits.
//!
//! Sample `i` takes its starting point from words `2i, 2i+1` of a ChaCha8
//! stream keyed by the seed, so the result does not depend on how the work is
//! sharded.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{GkwError, Result};
use crate::gauss::{map_unchecked, MapParam};

/// Fewer samples than this are rejected.
pub const MIN_SAMPLES: usize = 10_000;

const SHARD: usize = 1 << 16;

/// Empirical distribution function of `T_p^n(x_0)` at given abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    /// Binomial standard error of each value.
    pub std_errors: Vec<f64>,
    pub samples: usize,
}

/// `sqrt(v (1 - v) / samples)`, floored at `1 / samples` so that an
/// empirical 0 or 1 does not claim zero uncertainty.
pub fn binomial_std_error(v: f64, samples: usize) -> f64 {
    let n = samples as f64;
    (v * (1.0 - v) / n).sqrt().max(1.0 / n)
}

fn uniform_open(u: u64) -> f64 {
    ((u >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

pub fn montecarlo_cdf(
    param: &MapParam,
    n: usize,
    samples: usize,
    seed: u64,
    xs: &[f64],
) -> Result<McEstimate> {
    if samples < MIN_SAMPLES {
        return Err(GkwError::InvalidInput(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    if let Some(&x) = xs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(GkwError::Domain {
            what: "montecarlo_cdf",
            value: x,
            domain: "[0, 1]",
        });
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let p = param.pf();
    let shards = samples.div_ceil(SHARD);

    // hist[i] counts endpoints y with sorted[i-1] < y <= sorted[i]
    let hist = (0..shards)
        .into_par_iter()
        .map(|s| {
            let start = s * SHARD;
            let end = (start + SHARD).min(samples);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_word_pos(2 * start as u128);
            let mut h = vec![0u64; sorted.len() + 1];
            for _ in start..end {
                let mut x = uniform_open(rng.next_u64());
                for _ in 0..n {
                    x = map_unchecked(p, x);
                }
                h[sorted.partition_point(|&a| a < x)] += 1;
            }
            h
        })
        .reduce(
            || vec![0u64; sorted.len() + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let mut cum = Vec::with_capacity(sorted.len());
    let mut acc = 0u64;
    for h in &hist[..sorted.len()] {
        acc += h;
        cum.push(acc);
    }
    let values: Vec<f64> = xs
        .iter()
        .map(|x| {
            // last sorted position equal to x, so ties see all counts up to x
            let i = sorted.partition_point(|&a| a <= *x) - 1;
            cum[i] as f64 / samples as f64
        })
        .collect();
    let std_errors = values
        .iter()
        .map(|&v| binomial_std_error(v, samples))
        .collect();
    Ok(McEstimate {
        xs: xs.to_vec(),
        values,
        std_errors,
        samples,
    })
}
