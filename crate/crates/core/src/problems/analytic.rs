use std::f64::consts::{E, PI};
use std::str::FromStr;

use serde_json::json;

use super::{Problem, ProblemMetadata};
use crate::error::{Error, Result};

/// Classic continuous test functions, evaluated on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticFunction {
    Ackley,
    Alpine,
    Exponential,
    Griewank,
    Michalewicz,
    Piston,
    Qing,
    Rastrigin,
    Schaffer,
    Schwefel,
}

/// Parameter ranges of the piston cycle-time model, in argument order
/// `M, S, V0, k, P0, Ta, T0`.
const PISTON_BOUNDS: [(f64, f64); 7] = [
    (30.0, 60.0),
    (0.005, 0.020),
    (0.002, 0.010),
    (1000.0, 5000.0),
    (90_000.0, 110_000.0),
    (290.0, 296.0),
    (340.0, 360.0),
];

impl AnalyticFunction {
    pub const ALL: [AnalyticFunction; 10] = [
        AnalyticFunction::Ackley,
        AnalyticFunction::Alpine,
        AnalyticFunction::Exponential,
        AnalyticFunction::Griewank,
        AnalyticFunction::Michalewicz,
        AnalyticFunction::Piston,
        AnalyticFunction::Qing,
        AnalyticFunction::Rastrigin,
        AnalyticFunction::Schaffer,
        AnalyticFunction::Schwefel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnalyticFunction::Ackley => "ackley",
            AnalyticFunction::Alpine => "alpine",
            AnalyticFunction::Exponential => "exponential",
            AnalyticFunction::Griewank => "griewank",
            AnalyticFunction::Michalewicz => "michalewicz",
            AnalyticFunction::Piston => "piston",
            AnalyticFunction::Qing => "qing",
            AnalyticFunction::Rastrigin => "rastrigin",
            AnalyticFunction::Schaffer => "schaffer",
            AnalyticFunction::Schwefel => "schwefel",
        }
    }

    /// Search box for dimension `d`.
    pub fn domain(self, d: usize) -> Vec<(f64, f64)> {
        let same = |a: f64, b: f64| vec![(a, b); d];
        match self {
            AnalyticFunction::Ackley => same(-32.768, 32.768),
            AnalyticFunction::Alpine => same(-10.0, 10.0),
            AnalyticFunction::Exponential => same(-1.0, 1.0),
            AnalyticFunction::Griewank => same(-600.0, 600.0),
            AnalyticFunction::Michalewicz => same(0.0, PI),
            AnalyticFunction::Piston => PISTON_BOUNDS.to_vec(),
            AnalyticFunction::Qing => same(-500.0, 500.0),
            AnalyticFunction::Rastrigin => same(-5.12, 5.12),
            AnalyticFunction::Schaffer => same(-100.0, 100.0),
            AnalyticFunction::Schwefel => same(-500.0, 500.0),
        }
    }

    /// Value at a continuous point.
    pub fn eval(self, x: &[f64]) -> f64 {
        let d = x.len() as f64;
        match self {
            AnalyticFunction::Ackley => {
                let sq = x.iter().map(|v| v * v).sum::<f64>() / d;
                let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
                -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
            }
            AnalyticFunction::Alpine => x.iter().map(|v| (v * v.sin() + 0.1 * v).abs()).sum(),
            AnalyticFunction::Exponential => -(-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp(),
            AnalyticFunction::Griewank => {
                let s = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let p: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                1.0 + s - p
            }
            AnalyticFunction::Michalewicz => -x
                .iter()
                .enumerate()
                .map(|(i, v)| v.sin() * ((i + 1) as f64 * v * v / PI).sin().powi(20))
                .sum::<f64>(),
            AnalyticFunction::Piston => {
                let (m, s, v0, k, p0, ta, t0) = (x[0], x[1], x[2], x[3], x[4], x[5], x[6]);
                let a = p0 * s + 19.62 * m - k * v0 / s;
                let v = s / (2.0 * k) * ((a * a + 4.0 * k * p0 * v0 * ta / t0).sqrt() - a);
                2.0 * PI * (m / (k + s * s * p0 * v0 * ta / (t0 * v * v))).sqrt()
            }
            AnalyticFunction::Qing => x
                .iter()
                .enumerate()
                .map(|(i, v)| (v * v - (i + 1) as f64).powi(2))
                .sum(),
            AnalyticFunction::Rastrigin => {
                10.0 * d + x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos()).sum::<f64>()
            }
            AnalyticFunction::Schaffer => x
                .windows(2)
                .map(|w| {
                    let r2 = w[0] * w[0] + w[1] * w[1];
                    0.5 + (r2.sqrt().sin().powi(2) - 0.5) / (1.0 + 0.001 * r2).powi(2)
                })
                .sum(),
            AnalyticFunction::Schwefel => -x.iter().map(|v| v * v.abs().sqrt().sin()).sum::<f64>(),
        }
    }
}

impl FromStr for AnalyticFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AnalyticFunction::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

/// Analytic function sampled at `grid` equispaced nodes per dimension,
/// `x_i = a_i + n_i (b_i - a_i) / (grid - 1)`.
#[derive(Debug, Clone)]
pub struct AnalyticProblem {
    function: AnalyticFunction,
    shape: Vec<usize>,
    domain: Vec<(f64, f64)>,
}

impl AnalyticProblem {
    pub fn new(function: AnalyticFunction, d: usize, grid: usize) -> Result<Self> {
        if grid < 2 {
            return Err(Error::InvalidProblem("grid needs at least 2 nodes".into()));
        }
        if d == 0 {
            return Err(Error::InvalidProblem("dimension must be positive".into()));
        }
        if function == AnalyticFunction::Piston && d != 7 {
            return Err(Error::InvalidProblem("piston is 7-dimensional".into()));
        }
        Ok(AnalyticProblem {
            function,
            shape: vec![grid; d],
            domain: function.domain(d),
        })
    }

    pub fn function(&self) -> AnalyticFunction {
        self.function
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    /// Continuous coordinates of a grid index.
    pub fn point(&self, x: &[usize]) -> Vec<f64> {
        x.iter()
            .zip(&self.domain)
            .zip(&self.shape)
            .map(|((&n, &(a, b)), &grid)| a + n as f64 * (b - a) / (grid - 1) as f64)
            .collect()
    }
}

impl Problem for AnalyticProblem {
    fn name(&self) -> &str {
        self.function.name()
    }

    fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn value(&self, x: &[usize]) -> f64 {
        self.function.eval(&self.point(x))
    }

    fn metadata(&self) -> ProblemMetadata {
        ProblemMetadata {
            name: self.name().to_string(),
            d: self.shape.len(),
            shape: self.shape.clone(),
            description: format!("{} on a uniform grid", self.name()),
            seed: None,
            params: json!({ "grid": self.shape[0], "domain": self.domain }),
        }
    }
}

/// Looks up an analytic benchmark by name.
pub fn analytic_problem(name: &str, d: usize, grid: usize) -> Result<AnalyticProblem> {
    AnalyticProblem::new(name.parse()?, d, grid)
}
