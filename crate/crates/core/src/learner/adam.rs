use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor_train::TensorTrain;

/// Adam moment accumulators, one per core entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// Number of steps taken so far.
    pub t: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new(tt: &TensorTrain, beta1: f64, beta2: f64, eps: f64) -> Self {
        let zeros: Vec<Vec<f64>> = tt.cores().iter().map(|c| vec![0.0; c.len()]).collect();
        AdamState {
            beta1,
            beta2,
            eps,
            t: 0,
            m: zeros.clone(),
            v: zeros,
        }
    }

    pub fn first_moment(&self) -> &[Vec<f64>] {
        &self.m
    }

    pub fn second_moment(&self) -> &[Vec<f64>] {
        &self.v
    }
}

/// One bias-corrected Adam step that *ascends* along `grad`.
pub fn adam_step(tt: &mut TensorTrain, grad: &[Vec<f64>], state: &mut AdamState, lr: f64) -> Result<()> {
    let shapes_match = grad.len() == tt.ndim()
        && state.m.len() == tt.ndim()
        && grad
            .iter()
            .zip(tt.cores())
            .zip(&state.m)
            .all(|((g, c), m)| g.len() == c.len() && m.len() == c.len());
    if !shapes_match {
        return Err(Error::GradientShape);
    }
    if grad.iter().flatten().any(|g| !g.is_finite()) {
        return Err(Error::NonFiniteGradient);
    }

    state.t += 1;
    let (b1, b2) = (state.beta1, state.beta2);
    let correction1 = 1.0 - b1.powf(state.t as f64);
    let correction2 = 1.0 - b2.powf(state.t as f64);
    for (i, g) in grad.iter().enumerate() {
        let core = tt.core_mut(i);
        let m = &mut state.m[i];
        let v = &mut state.v[i];
        for j in 0..g.len() {
            m[j] = b1 * m[j] + (1.0 - b1) * g[j];
            v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
            let m_hat = m[j] / correction1;
            let v_hat = v[j] / correction2;
            core[j] += lr * m_hat / (v_hat.sqrt() + state.eps);
        }
        if core.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteGradient);
        }
    }
    Ok(())
}
