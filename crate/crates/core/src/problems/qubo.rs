use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::{Problem, ProblemMetadata};
use crate::error::{Error, Result};
use crate::rng;

/// Edge probability of the random graphs.
const EDGE_PROBABILITY: f64 = 0.5;
/// Penalty weight on uncovered edges in vertex cover.
const COVER_PENALTY: f64 = 8.0;
const BINARY_KNAPSACK_CAPACITY: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuboKind {
    MaxCut,
    MinVertexCover,
    QuadraticKnapsack,
    BinaryKnapsack,
}

impl QuboKind {
    pub const ALL: [QuboKind; 4] = [
        QuboKind::MaxCut,
        QuboKind::MinVertexCover,
        QuboKind::QuadraticKnapsack,
        QuboKind::BinaryKnapsack,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QuboKind::MaxCut => "max_cut",
            QuboKind::MinVertexCover => "min_vertex_cover",
            QuboKind::QuadraticKnapsack => "quadratic_knapsack",
            QuboKind::BinaryKnapsack => "binary_knapsack",
        }
    }
}

impl FromStr for QuboKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "knapsack" => Ok(QuboKind::BinaryKnapsack),
            _ => QuboKind::ALL
                .into_iter()
                .find(|k| k.name() == s)
                .ok_or_else(|| Error::UnknownProblem(s.to_string())),
        }
    }
}

/// Capacity constraint `w·x <= C`, enforced by the linear penalty
/// `penalty * max(0, w·x - C)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnapsackConstraint {
    pub weights: Vec<f64>,
    pub capacity: f64,
    pub penalty: f64,
}

/// Symmetric quadratic form over binary vectors, optionally with a
/// penalized capacity constraint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuboInstance {
    pub d: usize,
    /// Row-major `d x d` symmetric matrix.
    pub q: Vec<f64>,
    pub constraint: Option<KnapsackConstraint>,
    /// Constant dropped from the quadratic form (reported, never added).
    pub offset: f64,
}

impl QuboInstance {
    pub fn new(d: usize, q: Vec<f64>) -> Result<Self> {
        if q.len() != d * d {
            return Err(Error::InvalidProblem("Q must be d x d".into()));
        }
        for i in 0..d {
            for j in 0..i {
                if q[i * d + j] != q[j * d + i] {
                    return Err(Error::InvalidProblem("Q must be symmetric".into()));
                }
            }
        }
        Ok(QuboInstance {
            d,
            q,
            constraint: None,
            offset: 0.0,
        })
    }

    pub fn q(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.d + j]
    }

    /// `x^T Q x`.
    pub fn quadratic_form(&self, x: &[usize]) -> f64 {
        let ones: Vec<usize> = (0..self.d).filter(|&i| x[i] == 1).collect();
        ones.iter()
            .map(|&i| ones.iter().map(|&j| self.q(i, j)).sum::<f64>())
            .sum()
    }

    pub fn objective(&self, x: &[usize]) -> f64 {
        let mut f = self.quadratic_form(x);
        if let Some(c) = &self.constraint {
            let load: f64 = x.iter().zip(&c.weights).map(|(&xi, w)| xi as f64 * w).sum();
            f += c.penalty * (load - c.capacity).max(0.0);
        }
        f
    }

    /// Seeded instance of the given kind.
    pub fn generate(kind: QuboKind, d: usize, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidProblem("dimension must be positive".into()));
        }
        let mut rng = rng::stream(seed, 0);
        let mut q = vec![0.0; d * d];
        let inst = match kind {
            QuboKind::MaxCut => {
                for (i, j) in random_edges(d, &mut rng) {
                    q[i * d + j] = 1.0;
                    q[j * d + i] = 1.0;
                    q[i * d + i] -= 1.0;
                    q[j * d + j] -= 1.0;
                }
                QuboInstance::new(d, q)?
            }
            QuboKind::MinVertexCover => {
                let edges = random_edges(d, &mut rng);
                for i in 0..d {
                    q[i * d + i] = 1.0;
                }
                for &(i, j) in &edges {
                    q[i * d + j] = COVER_PENALTY / 2.0;
                    q[j * d + i] = COVER_PENALTY / 2.0;
                    q[i * d + i] -= COVER_PENALTY;
                    q[j * d + j] -= COVER_PENALTY;
                }
                let mut inst = QuboInstance::new(d, q)?;
                inst.offset = COVER_PENALTY * edges.len() as f64;
                inst
            }
            QuboKind::QuadraticKnapsack => {
                let mut total_profit = 0.0;
                for i in 0..d {
                    for j in i..d {
                        if rng.gen_bool(EDGE_PROBABILITY) {
                            let p = rng.gen_range(1..=100) as f64;
                            total_profit += p;
                            if i == j {
                                q[i * d + i] = -p;
                            } else {
                                q[i * d + j] = -p / 2.0;
                                q[j * d + i] = -p / 2.0;
                            }
                        }
                    }
                }
                let weights: Vec<f64> = (0..d).map(|_| rng.gen_range(1..=50) as f64).collect();
                let capacity = (weights.iter().sum::<f64>() / 2.0).floor();
                let mut inst = QuboInstance::new(d, q)?;
                inst.constraint = Some(KnapsackConstraint {
                    weights,
                    capacity,
                    // Any overload of at least one unit costs more than all profit.
                    penalty: total_profit + 1.0,
                });
                inst
            }
            QuboKind::BinaryKnapsack => {
                let weights: Vec<f64> = (0..d).map(|_| rng.gen_range(5..=20) as f64).collect();
                let profits: Vec<f64> = (0..d).map(|_| rng.gen_range(50..=100) as f64).collect();
                for (i, p) in profits.iter().enumerate() {
                    q[i * d + i] = -p;
                }
                let max_profit = profits.iter().cloned().fold(0.0, f64::max);
                let mut inst = QuboInstance::new(d, q)?;
                inst.constraint = Some(KnapsackConstraint {
                    weights,
                    capacity: BINARY_KNAPSACK_CAPACITY,
                    penalty: 10.0 * max_profit,
                });
                inst
            }
        };
        Ok(inst)
    }
}

fn random_edges(d: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            if rng.gen_bool(EDGE_PROBABILITY) {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// A [`QuboInstance`] exposed as a black-box problem over `{0,1}^d`.
#[derive(Debug, Clone)]
pub struct QuboProblem {
    name: String,
    kind: Option<QuboKind>,
    seed: Option<u64>,
    shape: Vec<usize>,
    instance: QuboInstance,
}

impl QuboProblem {
    pub fn from_instance(name: impl Into<String>, instance: QuboInstance) -> Self {
        QuboProblem {
            name: name.into(),
            kind: None,
            seed: None,
            shape: vec![2; instance.d],
            instance,
        }
    }

    pub fn instance(&self) -> &QuboInstance {
        &self.instance
    }

    pub fn kind(&self) -> Option<QuboKind> {
        self.kind
    }
}

impl Problem for QuboProblem {
    fn name(&self) -> &str {
        &self.name
    }

    fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn value(&self, x: &[usize]) -> f64 {
        self.instance.objective(x)
    }

    fn metadata(&self) -> ProblemMetadata {
        ProblemMetadata {
            name: self.name.clone(),
            d: self.instance.d,
            shape: self.shape.clone(),
            description: "binary quadratic objective x^T Q x".into(),
            seed: self.seed,
            params: json!({
                "kind": self.kind,
                "edge_probability": EDGE_PROBABILITY,
                "instance": self.instance,
            }),
        }
    }
}

/// Seeded QUBO benchmark of the given kind (`max_cut`, `min_vertex_cover`,
/// `quadratic_knapsack`, `binary_knapsack` or its alias `knapsack`).
pub fn qubo_problem(kind: &str, d: usize, seed: u64) -> Result<QuboProblem> {
    let kind: QuboKind = kind.parse()?;
    let instance = QuboInstance::generate(kind, d, seed)?;
    Ok(QuboProblem {
        name: kind.name().to_string(),
        kind: Some(kind),
        seed: Some(seed),
        shape: vec![2; d],
        instance,
    })
}
