//! Moving block bootstrap of decomposition remainders.
//!
//! Perturbed copies of a series are built by keeping its trend and seasonal
//! components and replacing the remainder with a block-bootstrapped version,
//! so every copy has a known decomposition.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mstl::Decomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resampler {
    MovingBlock,
    /// Returns the remainder unchanged. Useful for checking the assembly path.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MbbConfig {
    pub block_length: usize,
    pub replicates: usize,
    pub seed: u64,
    pub resampler: Resampler,
}

impl MbbConfig {
    pub fn new(block_length: usize, replicates: usize, seed: u64) -> Self {
        Self {
            block_length,
            replicates,
            seed,
            resampler: Resampler::MovingBlock,
        }
    }

    /// RNG for replicate `index`: ChaCha8 seeded with `seed`, one stream per replicate.
    pub fn replicate_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

/// Twice the longest period, capped at half the series length. Series with
/// no periods get blocks of eight observations (again capped).
pub fn default_block_length(periods: &[usize], series_length: usize) -> usize {
    let wanted = periods.iter().max().map_or(8, |p| 2 * p);
    wanted.min(series_length / 2).max(1)
}

/// Concatenates the blocks starting at `starts`, drops `offset` leading
/// values and keeps `n` values.
pub fn assemble_blocks(x: &[f64], block_length: usize, starts: &[usize], offset: usize, n: usize) -> Vec<f64> {
    starts
        .iter()
        .flat_map(|&s| x[s..s + block_length].iter().copied())
        .skip(offset)
        .take(n)
        .collect()
}

pub fn mbb_resample_with<R: Rng + ?Sized>(remainder: &[f64], block_length: usize, rng: &mut R) -> Result<Vec<f64>> {
    let n = remainder.len();
    if block_length == 0 {
        return Err(Error::invalid("block_length", "must be at least 1"));
    }
    if block_length > n {
        return Err(Error::invalid(
            "block_length",
            format!("{block_length} exceeds series length {n}"),
        ));
    }
    let blocks = n / block_length + 2;
    let starts: Vec<usize> = (0..blocks)
        .map(|_| rng.random_range(0..=n - block_length))
        .collect();
    let offset = rng.random_range(0..block_length);
    Ok(assemble_blocks(remainder, block_length, &starts, offset, n))
}

/// One moving-block resample of `remainder` using the replicate-0 stream of `cfg`.
pub fn mbb_resample(remainder: &[f64], cfg: &MbbConfig) -> Result<Vec<f64>> {
    match cfg.resampler {
        Resampler::Identity => Ok(remainder.to_vec()),
        Resampler::MovingBlock => mbb_resample_with(remainder, cfg.block_length, &mut cfg.replicate_rng(0)),
    }
}

/// A set of perturbed series sharing one ground-truth decomposition.
#[derive(Debug, Clone)]
pub struct PerturbedCorpus {
    pub truth: Decomposition,
    pub replicates: Vec<Vec<f64>>,
    pub remainders: Vec<Vec<f64>>,
    pub block_length: usize,
}

pub fn perturb_series(series: &[f64], decomposition: &Decomposition, cfg: &MbbConfig) -> Result<PerturbedCorpus> {
    let n = series.len();
    if decomposition.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: decomposition.len(),
        });
    }
    if cfg.replicates == 0 {
        return Err(Error::invalid("replicates", "must be at least 1"));
    }
    let mut base = decomposition.trend.clone();
    for s in decomposition.seasonals.values() {
        for (b, v) in base.iter_mut().zip(s) {
            *b += v;
        }
    }
    let remainders = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| match cfg.resampler {
            Resampler::Identity => Ok(decomposition.remainder.clone()),
            Resampler::MovingBlock => {
                mbb_resample_with(&decomposition.remainder, cfg.block_length, &mut cfg.replicate_rng(r))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let replicates = remainders
        .iter()
        .map(|rem| base.iter().zip(rem).map(|(b, r)| b + r).collect())
        .collect();
    Ok(PerturbedCorpus {
        truth: decomposition.clone(),
        replicates,
        remainders,
        block_length: cfg.block_length,
    })
}
