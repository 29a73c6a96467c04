//! Discrete-time optimal control of `dz/dt = z^3 - x(t)` with a binary switch.

use serde::Serialize;
use serde_json::json;

use super::{Problem, ProblemMetadata};
use crate::constraints::{build_indicator_tt, min_run_spec};
use crate::error::{Error, Result};
use crate::tensor_train::TensorTrain;

/// `|z|` beyond this stops the integration.
pub const BLOWUP_BOUND: f64 = 1e6;
/// Per missing state in [`BlowupPolicy::Penalized`]; exceeds any partial cost.
pub const BLOWUP_STEP_PENALTY: f64 = 1e15;

/// Control horizon and integrator settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlInstance {
    /// Horizon `T`; controls are `x(0..=T)`.
    pub horizon: usize,
    pub z0: f64,
    pub z_ref: f64,
    /// Fixed RK4 steps per unit interval.
    pub substeps: usize,
}

/// Result of simulating one control sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum ControlOutcome {
    /// `J = 1/2 Σ_{t=0}^{T} (z(t) - z_ref)^2` with the state path.
    Completed { cost: f64, states: Vec<f64> },
    /// The state left `[-BLOWUP_BOUND, BLOWUP_BOUND]` while integrating over
    /// `[interval, interval + 1)`; `partial_cost` sums the recorded states.
    BlowUp { interval: usize, partial_cost: f64 },
}

impl ControlInstance {
    pub fn new(horizon: usize, substeps: usize) -> Result<Self> {
        if horizon == 0 || substeps == 0 {
            return Err(Error::InvalidProblem("horizon and substeps must be positive".into()));
        }
        Ok(ControlInstance {
            horizon,
            z0: 0.8,
            z_ref: 0.7,
            substeps,
        })
    }

    /// Integrates with classical RK4. Control `x(t)` acts on `[t, t+1)`, so
    /// the last control `x(T)` never influences the recorded path.
    pub fn simulate(&self, x: &[usize]) -> ControlOutcome {
        let h = 1.0 / self.substeps as f64;
        let mut z = self.z0;
        let mut cost = 0.5 * (z - self.z_ref).powi(2);
        let mut states = Vec::with_capacity(self.horizon + 1);
        states.push(z);
        for (t, &control) in x.iter().take(self.horizon).enumerate() {
            let u = control as f64;
            let rhs = |z: f64| z * z * z - u;
            for _ in 0..self.substeps {
                let k1 = rhs(z);
                let k2 = rhs(z + 0.5 * h * k1);
                let k3 = rhs(z + 0.5 * h * k2);
                let k4 = rhs(z + h * k3);
                z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                if !z.is_finite() || z.abs() > BLOWUP_BOUND {
                    return ControlOutcome::BlowUp {
                        interval: t,
                        partial_cost: cost,
                    };
                }
            }
            cost += 0.5 * (z - self.z_ref).powi(2);
            states.push(z);
        }
        ControlOutcome::Completed { cost, states }
    }
}

/// How a blown-up trajectory is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlowupPolicy {
    /// `+inf`.
    Infinite,
    /// `BLOWUP_STEP_PENALTY * missing_states + partial_cost`: finite, larger
    /// than any completed cost, and smaller the longer the state survived.
    Penalized,
}

/// Control instance as a black-box problem over `{0,1}^{T+1}`.
#[derive(Debug, Clone)]
pub struct ControlProblem {
    name: String,
    instance: ControlInstance,
    policy: BlowupPolicy,
    shape: Vec<usize>,
}

impl ControlProblem {
    pub fn new(instance: ControlInstance, policy: BlowupPolicy) -> Self {
        ControlProblem {
            name: format!("control_T{}", instance.horizon),
            shape: vec![2; instance.horizon + 1],
            instance,
            policy,
        }
    }

    pub fn instance(&self) -> &ControlInstance {
        &self.instance
    }

    pub fn with_policy(mut self, policy: BlowupPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl Problem for ControlProblem {
    fn name(&self) -> &str {
        &self.name
    }

    fn shape(&self) -> &[usize] {
        &self.shape
    }

    fn value(&self, x: &[usize]) -> f64 {
        match self.instance.simulate(x) {
            ControlOutcome::Completed { cost, .. } => cost,
            ControlOutcome::BlowUp { interval, partial_cost } => match self.policy {
                BlowupPolicy::Infinite => f64::INFINITY,
                BlowupPolicy::Penalized => {
                    let missing = self.instance.horizon - interval;
                    BLOWUP_STEP_PENALTY * missing as f64 + partial_cost
                }
            },
        }
    }

    fn metadata(&self) -> ProblemMetadata {
        ProblemMetadata {
            name: self.name.clone(),
            d: self.shape.len(),
            shape: self.shape.clone(),
            description: "binary control of dz/dt = z^3 - x, J = 1/2 sum (z(t) - z_ref)^2".into(),
            seed: None,
            params: json!({
                "instance": self.instance,
                "integrator": "rk4",
                "blowup_bound": BLOWUP_BOUND,
                "blowup_policy": self.policy,
            }),
        }
    }
}

/// Control problem with horizon `T` (`T + 1` binary modes).
pub fn control_problem(horizon: usize, substeps: usize) -> Result<ControlProblem> {
    Ok(ControlProblem::new(
        ControlInstance::new(horizon, substeps)?,
        BlowupPolicy::Penalized,
    ))
}

/// Control problem paired with the indicator of controls whose runs of ones
/// all have length at least `min_run`.
pub fn constrained_control_problem(
    horizon: usize,
    substeps: usize,
    min_run: usize,
) -> Result<(ControlProblem, TensorTrain)> {
    if horizon < min_run {
        return Err(Error::InvalidProblem(format!(
            "horizon {horizon} is shorter than the run length {min_run}"
        )));
    }
    let problem = control_problem(horizon, substeps)?.with_name(format!("control_constr_T{horizon}"));
    let indicator = build_indicator_tt(&min_run_spec(horizon + 1, min_run)?)?;
    Ok((problem, indicator))
}
