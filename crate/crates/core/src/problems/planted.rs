use rand::distributions::{Distribution, Open01};
use rand::Rng;
use serde_json::json;

use super::{unravel, Problem, ProblemMetadata, MAX_ENUMERATION};
use crate::error::{Error, Result};
use crate::rng;

/// Tensor with one planted zero: `f(x*) = 0` and `f(x) = 1 + u(x)` elsewhere,
/// where `u(x)` is seeded noise in `(0, 1)`. Values are tabulated up front.
pub struct PlantedProblem {
    name: String,
    shape: Vec<usize>,
    seed: u64,
    minimizer: Vec<usize>,
    table: Vec<f64>,
}

impl PlantedProblem {
    pub fn new(shape: Vec<usize>, seed: u64) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::InvalidProblem("planted problem needs a non-empty shape".into()));
        }
        let total = shape
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .filter(|&t| t <= MAX_ENUMERATION)
            .ok_or_else(|| Error::InvalidProblem("planted problem too large to tabulate".into()))?;
        let mut rng = rng::stream(seed, 0);
        let planted = rng.gen_range(0..total);
        let table = (0..total)
            .map(|i| {
                let noise: f64 = Open01.sample(&mut rng);
                if i == planted {
                    0.0
                } else {
                    1.0 + noise
                }
            })
            .collect();
        Ok(PlantedProblem {
            name: "planted".into(),
            minimizer: unravel(planted, &shape),
            shape,
            seed,
            table,
        })
    }

    /// The planted minimizer `x*`.
    pub fn minimizer(&self) -> &[usize] {
        &self.minimizer
    }

    fn linear(&self, x: &[usize]) -> usize {
        x.iter().zip(&self.shape).fold(0, |acc, (&xi, &n)| acc * n + xi)
    }
}

impl Problem for PlantedProblem {
    fn name(&self) -> &str {
        &self.name
    }

    fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn value(&self, x: &[usize]) -> f64 {
        self.table[self.linear(x)]
    }

    fn metadata(&self) -> ProblemMetadata {
        ProblemMetadata {
            name: self.name.clone(),
            d: self.shape.len(),
            shape: self.shape.clone(),
            description: "planted unique zero over seeded noise in (1, 2)".into(),
            seed: Some(self.seed),
            params: json!({ "minimizer": self.minimizer }),
        }
    }
}
