//! Tensor train (TT) representation of a `d`-dimensional array.
//!
//! Element `[n_1, ..., n_d]` is the chained product of matrix slices
//! `G_1[:, n_1, :] G_2[:, n_2, :] ... G_d[:, n_d, :]`, where core `i` has shape
//! `(R_{i-1}, N_i, R_i)` and the boundary ranks are `R_0 = R_d = 1`.
//!
//! Indices are 0-based throughout (`n_i` in `0..N_i`).

use std::fmt;
use std::ops::Deref;

use rand::distributions::{Distribution, Open01};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Added to `|p|` before taking the logarithm so exact zeros stay finite.
pub const LOG_FLOOR: f64 = 1e-300;

/// One candidate point: a mode index per dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn new(indices: Vec<usize>) -> Self {
        MultiIndex(indices)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl Deref for MultiIndex {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex(v)
    }
}

impl From<&[usize]> for MultiIndex {
    fn from(v: &[usize]) -> Self {
        MultiIndex(v.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// Tensor in TT format. Cores are stored flattened in row-major
/// `(left rank, mode, right rank)` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorTrainRepr", into = "TensorTrainRepr")]
pub struct TensorTrain {
    shape: Vec<usize>,
    ranks: Vec<usize>,
    cores: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct TensorTrainRepr {
    shape: Vec<usize>,
    ranks: Vec<usize>,
    cores: Vec<Vec<f64>>,
}

impl TryFrom<TensorTrainRepr> for TensorTrain {
    type Error = Error;

    fn try_from(r: TensorTrainRepr) -> Result<Self> {
        TensorTrain::from_cores(r.shape, r.ranks, r.cores)
    }
}

impl From<TensorTrain> for TensorTrainRepr {
    fn from(tt: TensorTrain) -> Self {
        TensorTrainRepr {
            shape: tt.shape,
            ranks: tt.ranks,
            cores: tt.cores,
        }
    }
}

fn check_shape(shape: &[usize]) -> Result<()> {
    if shape.is_empty() {
        return Err(Error::EmptyShape);
    }
    if let Some(mode) = shape.iter().position(|&n| n == 0) {
        return Err(Error::ZeroModeSize { mode });
    }
    Ok(())
}

impl TensorTrain {
    /// Builds a TT from explicit cores, validating every structural invariant.
    pub fn from_cores(shape: Vec<usize>, ranks: Vec<usize>, cores: Vec<Vec<f64>>) -> Result<Self> {
        check_shape(&shape)?;
        let d = shape.len();
        if ranks.len() != d + 1 {
            return Err(Error::InvalidTensorTrain(format!(
                "expected {} ranks, got {}",
                d + 1,
                ranks.len()
            )));
        }
        if ranks[0] != 1 || ranks[d] != 1 {
            return Err(Error::InvalidTensorTrain("boundary ranks must be 1".into()));
        }
        if ranks.contains(&0) {
            return Err(Error::ZeroRank);
        }
        if cores.len() != d {
            return Err(Error::InvalidTensorTrain(format!(
                "expected {d} cores, got {}",
                cores.len()
            )));
        }
        for (i, core) in cores.iter().enumerate() {
            let expected = ranks[i] * shape[i] * ranks[i + 1];
            if core.len() != expected {
                return Err(Error::InvalidTensorTrain(format!(
                    "core {i} has {} entries, expected {expected}",
                    core.len()
                )));
            }
            if core.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidTensorTrain(format!("core {i} has non-finite entries")));
            }
        }
        Ok(TensorTrain { shape, ranks, cores })
    }

    /// Every core entry set to `value`.
    pub fn filled(shape: Vec<usize>, ranks: Vec<usize>, value: f64) -> Result<Self> {
        check_shape(&shape)?;
        if ranks.len() != shape.len() + 1 {
            return Err(Error::InvalidTensorTrain("rank vector length".into()));
        }
        let cores = (0..shape.len())
            .map(|i| vec![value; ranks[i] * shape[i] * ranks[i + 1]])
            .collect();
        TensorTrain::from_cores(shape, ranks, cores)
    }

    /// Random TT with ranks `(1, R, ..., R, 1)` and entries i.i.d. uniform on `(0, 1)`.
    pub fn random(rank: usize, shape: &[usize], seed: u64) -> Result<Self> {
        check_shape(shape)?;
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        let d = shape.len();
        let mut ranks = vec![rank; d + 1];
        ranks[0] = 1;
        ranks[d] = 1;
        let mut rng = rng::stream(seed, rng::STREAM_INIT);
        let cores = (0..d)
            .map(|i| {
                (0..ranks[i] * shape[i] * ranks[i + 1])
                    .map(|_| Open01.sample(&mut rng))
                    .collect()
            })
            .collect();
        Ok(TensorTrain {
            shape: shape.to_vec(),
            ranks,
            cores,
        })
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// `(R_0, R_1, ..., R_d)`.
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn core(&self, i: usize) -> &[f64] {
        &self.cores[i]
    }

    pub fn cores(&self) -> &[Vec<f64>] {
        &self.cores
    }

    /// Mutable access for in-place updates; callers keep entries finite.
    pub(crate) fn core_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.cores[i]
    }

    /// Shape of core `i` as `(R_{i-1}, N_i, R_i)`.
    pub fn core_shape(&self, i: usize) -> (usize, usize, usize) {
        (self.ranks[i], self.shape[i], self.ranks[i + 1])
    }

    /// Entry `G_i[a, n, b]`.
    pub fn entry(&self, i: usize, a: usize, n: usize, b: usize) -> f64 {
        let (_, modes, right) = self.core_shape(i);
        self.cores[i][(a * modes + n) * right + b]
    }

    /// Total number of stored core entries.
    pub fn num_params(&self) -> usize {
        self.cores.iter().map(Vec::len).sum()
    }

    /// Multiplies every entry of core `i` by `c`.
    pub fn scale_core(&mut self, i: usize, c: f64) {
        self.cores[i].iter_mut().for_each(|v| *v *= c);
    }

    pub fn check_index(&self, x: &[usize]) -> Result<()> {
        if x.len() != self.ndim() {
            return Err(Error::IndexLength {
                expected: self.ndim(),
                got: x.len(),
            });
        }
        for (mode, (&index, &size)) in x.iter().zip(&self.shape).enumerate() {
            if index >= size {
                return Err(Error::IndexOutOfBounds { mode, index, size });
            }
        }
        Ok(())
    }

    /// `out = left · G_i[:, n, :]`.
    pub(crate) fn left_mul(&self, i: usize, n: usize, left: &[f64], out: &mut Vec<f64>) {
        let (r0, modes, r1) = self.core_shape(i);
        let core = &self.cores[i];
        out.clear();
        out.resize(r1, 0.0);
        for (a, &la) in left.iter().enumerate().take(r0) {
            if la == 0.0 {
                continue;
            }
            let row = &core[(a * modes + n) * r1..(a * modes + n + 1) * r1];
            for (o, &g) in out.iter_mut().zip(row) {
                *o += la * g;
            }
        }
    }

    /// `out = G_i[:, n, :] · right`.
    pub(crate) fn right_mul(&self, i: usize, n: usize, right: &[f64], out: &mut Vec<f64>) {
        let (r0, modes, r1) = self.core_shape(i);
        let core = &self.cores[i];
        out.clear();
        out.extend((0..r0).map(|a| {
            let row = &core[(a * modes + n) * r1..(a * modes + n + 1) * r1];
            row.iter().zip(right).map(|(g, r)| g * r).sum::<f64>()
        }));
    }

    /// Value of the tensor at `x`: the plain chained product of slices.
    pub fn eval(&self, x: &[usize]) -> Result<f64> {
        self.check_index(x)?;
        let mut left = vec![1.0];
        let mut next = Vec::new();
        for (i, &n) in x.iter().enumerate() {
            self.left_mul(i, n, &left, &mut next);
            std::mem::swap(&mut left, &mut next);
        }
        Ok(left[0])
    }

    /// `log |p[x]|` computed with a running log-scale; `-inf` for an exact zero.
    pub(crate) fn log_abs_exact(&self, x: &[usize]) -> Result<f64> {
        self.check_index(x)?;
        let mut left = vec![1.0];
        let mut next = Vec::new();
        let mut log_scale = 0.0;
        for (i, &n) in x.iter().enumerate() {
            self.left_mul(i, n, &left, &mut next);
            std::mem::swap(&mut left, &mut next);
            match rescale(&mut left) {
                Some(s) => log_scale += s,
                None => return Ok(f64::NEG_INFINITY),
            }
        }
        Ok(left[0].abs().ln() + log_scale)
    }

    /// `log(|p[x]| + LOG_FLOOR)`, stable for large `d`.
    pub fn log_eval(&self, x: &[usize]) -> Result<f64> {
        Ok(log_add_exp(self.log_abs_exact(x)?, LOG_FLOOR.ln()))
    }

    /// Right interface vectors for conditional sampling.
    ///
    /// `result[i]` is the contraction of cores `i+1..d` with every slice
    /// replaced by the sum of absolute slices `Σ_n |G_j[:, n, :]|`, a vector of
    /// length `R_{i+1}`. `result[d-1] = [1]`. Each vector is rescaled to unit
    /// max-norm; only its direction is used.
    pub fn right_interfaces(&self) -> Vec<Vec<f64>> {
        let d = self.ndim();
        let mut out = vec![Vec::new(); d];
        out[d - 1] = vec![1.0];
        for i in (1..d).rev() {
            let (r0, modes, r1) = self.core_shape(i);
            let core = &self.cores[i];
            let right = &out[i];
            let mut v: Vec<f64> = (0..r0)
                .map(|a| {
                    let block = &core[a * modes * r1..(a + 1) * modes * r1];
                    block
                        .chunks_exact(r1)
                        .map(|row| row.iter().zip(right).map(|(g, r)| g.abs() * r).sum::<f64>())
                        .sum()
                })
                .collect();
            rescale(&mut v);
            out[i - 1] = v;
        }
        out
    }
}

/// Divides `v` by its max-abs entry and returns the log of that factor,
/// or `None` when `v` is identically zero.
pub(crate) fn rescale(v: &mut [f64]) -> Option<f64> {
    let m = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if m == 0.0 || !m.is_finite() {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= m);
    Some(m.ln())
}

pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}
