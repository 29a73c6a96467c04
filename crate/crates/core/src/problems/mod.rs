//! Benchmark problems behind a single black-box interface.

mod analytic;
mod control;
mod planted;
mod qubo;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor_train::MultiIndex;

pub use analytic::{analytic_problem, AnalyticFunction, AnalyticProblem};
pub use control::{
    constrained_control_problem, control_problem, BlowupPolicy, ControlInstance, ControlOutcome, ControlProblem,
};
pub use planted::PlantedProblem;
pub use qubo::{qubo_problem, KnapsackConstraint, QuboInstance, QuboKind, QuboProblem};

/// Replayable description of a problem instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemMetadata {
    pub name: String,
    pub d: usize,
    pub shape: Vec<usize>,
    pub description: String,
    pub seed: Option<u64>,
    pub params: serde_json::Value,
}

/// A discrete black-box objective over a grid of multi-indices.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;

    /// Mode sizes `(N_1, ..., N_d)`.
    fn shape(&self) -> &[usize];

    /// Objective at one multi-index. NaN is allowed and treated as `+inf` by
    /// the optimizer.
    fn value(&self, x: &[usize]) -> f64;

    /// Objective over a batch, in input order.
    fn evaluate(&self, batch: &[MultiIndex]) -> Vec<f64> {
        batch.par_iter().map(|x| self.value(x)).collect()
    }

    fn metadata(&self) -> ProblemMetadata;
}

impl<P: Problem + ?Sized> Problem for Box<P> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn shape(&self) -> &[usize] {
        (**self).shape()
    }
    fn value(&self, x: &[usize]) -> f64 {
        (**self).value(x)
    }
    fn evaluate(&self, batch: &[MultiIndex]) -> Vec<f64> {
        (**self).evaluate(batch)
    }
    fn metadata(&self) -> ProblemMetadata {
        (**self).metadata()
    }
}

/// Wraps `f` as `-f`, turning maximization into minimization.
pub struct Negated<P>(pub P);

impl<P: Problem> Problem for Negated<P> {
    fn name(&self) -> &str {
        self.0.name()
    }
    fn shape(&self) -> &[usize] {
        self.0.shape()
    }
    fn value(&self, x: &[usize]) -> f64 {
        -self.0.value(x)
    }
    fn evaluate(&self, batch: &[MultiIndex]) -> Vec<f64> {
        self.0.evaluate(batch).into_iter().map(|y| -y).collect()
    }
    fn metadata(&self) -> ProblemMetadata {
        let mut meta = self.0.metadata();
        meta.description = format!("negated: {}", meta.description);
        meta
    }
}

/// Problem defined by a closure; handy for tests and ad-hoc objectives.
pub struct FnProblem<F> {
    name: String,
    shape: Vec<usize>,
    f: F,
}

impl<F> FnProblem<F>
where
    F: Fn(&[usize]) -> f64 + Send + Sync,
{
    pub fn new(name: impl Into<String>, shape: Vec<usize>, f: F) -> Self {
        FnProblem {
            name: name.into(),
            shape,
            f,
        }
    }
}

impl<F> Problem for FnProblem<F>
where
    F: Fn(&[usize]) -> f64 + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }
    fn shape(&self) -> &[usize] {
        &self.shape
    }
    fn value(&self, x: &[usize]) -> f64 {
        (self.f)(x)
    }
    fn metadata(&self) -> ProblemMetadata {
        ProblemMetadata {
            name: self.name.clone(),
            d: self.shape.len(),
            shape: self.shape.clone(),
            description: "closure objective".into(),
            seed: None,
            params: serde_json::Value::Null,
        }
    }
}

/// Decodes a row-major linear position into a multi-index.
pub fn unravel(mut linear: usize, shape: &[usize]) -> Vec<usize> {
    let mut x = vec![0; shape.len()];
    for (xi, &n) in x.iter_mut().zip(shape).rev() {
        *xi = linear % n;
        linear /= n;
    }
    x
}

/// Largest search space that [`exhaustive_minimum`] will enumerate.
pub const MAX_ENUMERATION: usize = 1 << 24;

/// Exact minimum by enumerating every multi-index. Ties resolve to the
/// smallest row-major position; NaN counts as `+inf`.
pub fn exhaustive_minimum<P: Problem + ?Sized>(problem: &P) -> Result<(MultiIndex, f64)> {
    let shape = problem.shape();
    let total = shape
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .filter(|&t| t <= MAX_ENUMERATION)
        .ok_or_else(|| Error::InvalidProblem("search space too large to enumerate".into()))?;
    let (pos, y) = (0..total)
        .into_par_iter()
        .map(|i| {
            let y = problem.value(&unravel(i, shape));
            (i, if y.is_nan() { f64::INFINITY } else { y })
        })
        .reduce(
            || (usize::MAX, f64::INFINITY),
            |a, b| match a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)) {
                std::cmp::Ordering::Greater => b,
                _ => a,
            },
        );
    if pos == usize::MAX {
        return Err(Error::NoFiniteValues);
    }
    Ok((MultiIndex(unravel(pos, shape)), y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unravel_row_major() {
        assert_eq!(unravel(0, &[2, 3]), vec![0, 0]);
        assert_eq!(unravel(5, &[2, 3]), vec![1, 2]);
        assert_eq!(unravel(4, &[2, 3]), vec![1, 1]);
    }

    #[test]
    fn exhaustive_minimum_finds_first_tie() {
        let p = FnProblem::new("t", vec![3, 3], |x: &[usize]| ((x[0] + x[1]) % 2) as f64);
        let (x, y) = exhaustive_minimum(&p).unwrap();
        assert_eq!(x.as_slice(), &[0, 0]);
        assert_eq!(y, 0.0);
    }

    #[test]
    fn negation_flips_values() {
        let p = FnProblem::new("t", vec![4], |x: &[usize]| x[0] as f64);
        let n = Negated(p);
        let batch = vec![MultiIndex(vec![3]), MultiIndex(vec![1])];
        assert_eq!(n.evaluate(&batch), vec![-3.0, -1.0]);
    }
}
