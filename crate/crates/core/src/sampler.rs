//! Drawing multi-indices from a TT tensor with probability proportional to
//! its (absolute) values, one mode at a time from univariate conditionals.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng;
use crate::tensor_train::{rescale, MultiIndex, TensorTrain};

/// `K` samples drawn from one tensor with one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub indices: Vec<MultiIndex>,
    pub seed: u64,
}

/// Inverse-CDF draw: the smallest `n` whose cumulative normalized weight
/// exceeds `u` (strictly).
pub fn categorical_draw(weights: &[f64], u: f64) -> Result<usize> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidWeights("weights must be finite and nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidWeights("weights sum to zero".into()));
    }
    let mut cumulative = 0.0;
    let mut last_positive = 0;
    for (n, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = n;
            cumulative += w;
            if cumulative / total > u {
                return Ok(n);
            }
        }
    }
    // Rounding can leave the final cumulative just below `u`.
    Ok(last_positive)
}

/// Draws `k` independent samples. Sample `j` uses its own random stream
/// derived from `(seed, j)`, so the batch does not depend on thread count.
pub fn tt_sample(tt: &TensorTrain, k: usize, seed: u64) -> Result<SampleBatch> {
    if k == 0 {
        return Err(Error::ZeroSamples);
    }
    let right = tt.right_interfaces();
    let indices = (0..k)
        .into_par_iter()
        .map(|j| sample_one(tt, &right, seed, j as u64))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleBatch { indices, seed })
}

fn sample_one(tt: &TensorTrain, right: &[Vec<f64>], seed: u64, position: u64) -> Result<MultiIndex> {
    let mut rng = rng::stream(seed, rng::STREAM_SAMPLES + position);
    let d = tt.ndim();
    let mut left = vec![1.0];
    let mut row = Vec::new();
    let mut weights = Vec::new();
    let mut x = Vec::with_capacity(d);
    for i in 0..d {
        weights.clear();
        for n in 0..tt.shape()[i] {
            tt.left_mul(i, n, &left, &mut row);
            let q: f64 = row.iter().zip(&right[i]).map(|(a, b)| a * b).sum();
            weights.push(q.abs());
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::DegenerateDistribution { mode: i });
        }
        let u: f64 = rng.gen();
        let n = categorical_draw(&weights, u)?;
        tt.left_mul(i, n, &left, &mut row);
        std::mem::swap(&mut left, &mut row);
        if rescale(&mut left).is_none() {
            return Err(Error::DegenerateDistribution { mode: i });
        }
        x.push(n);
    }
    Ok(MultiIndex(x))
}
