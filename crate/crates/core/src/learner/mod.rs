//! The optimization loop: sample candidates from the TT model, evaluate them,
//! keep the best `k`, and raise their likelihood with Adam.

mod adam;
mod likelihood;
mod trace;

use std::time::Instant;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::rng;
use crate::sampler::tt_sample;
use crate::tensor_train::{MultiIndex, TensorTrain};

pub use adam::{adam_step, AdamState};
pub use likelihood::{
    log_normalizer, log_normalizer_gradient, loss, loss_gradient, normalized_loss, normalized_loss_gradient,
    CoreGradients,
};
pub use trace::{RunTrace, TraceRecord};

/// Hyperparameters of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtesConfig {
    /// Total objective-evaluation budget `M`.
    pub budget: usize,
    /// Samples drawn per iteration `K`.
    pub samples: usize,
    /// Candidates kept per iteration `k`.
    pub top_k: usize,
    /// Adam steps per iteration.
    pub gd_steps: usize,
    pub lr: f64,
    /// TT-rank of the random initial model.
    pub rank: usize,
    pub seed: u64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    #[serde(default)]
    pub likelihood: Likelihood,
}

/// Objective ascended in each update step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Likelihood {
    /// [`normalized_loss`]: log-probability of the selection under `|p| / Z`.
    #[default]
    Normalized,
    /// [`loss`]: raw `Σ log|p[x]|`, which is unbounded above in the scale of
    /// the cores.
    Unnormalized,
}

impl Default for ProtesConfig {
    fn default() -> Self {
        ProtesConfig {
            budget: 10_000,
            samples: 100,
            top_k: 10,
            gd_steps: 1,
            lr: 0.05,
            rank: 5,
            seed: 0,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            likelihood: Likelihood::Normalized,
        }
    }
}

impl ProtesConfig {
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.top_k == 0 || self.samples == 0 || self.gd_steps == 0 || self.rank == 0 {
            return bad("k, K, k_gd and R must be positive");
        }
        if self.top_k > self.samples {
            return bad("k must not exceed K");
        }
        if self.samples > self.budget {
            return bad("K must not exceed the budget M");
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return bad("learning rate must be positive");
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return bad("Adam betas must lie in [0, 1)");
        }
        if !(self.adam_eps.is_finite() && self.adam_eps > 0.0) {
            return bad("Adam epsilon must be positive");
        }
        Ok(())
    }

    /// Number of iterations the budget allows, `floor(M / K)`.
    pub fn iterations(&self) -> usize {
        self.budget / self.samples
    }
}

/// Positions of the `k` smallest values, smallest first; ties keep the
/// earlier position. NaN sorts as `+inf`.
pub fn select_top_k(ys: &[f64], k: usize) -> Result<Vec<usize>> {
    if k > ys.len() {
        return Err(Error::SelectionTooLarge { k, len: ys.len() });
    }
    let key = |y: f64| if y.is_nan() { f64::INFINITY } else { y };
    let mut order: Vec<usize> = (0..ys.len()).collect();
    order.sort_by(|&a, &b| key(ys[a]).total_cmp(&key(ys[b])).then(a.cmp(&b)));
    order.truncate(k);
    Ok(order)
}

/// What the observer sees after each iteration's selection.
pub struct IterationView<'a> {
    pub iter: usize,
    pub samples: &'a [MultiIndex],
    /// Objective values with NaN already replaced by `+inf`.
    pub values: &'a [f64],
    /// Positions in `samples` that were used for the update.
    pub selected: &'a [usize],
    pub model: &'a TensorTrain,
}

/// Result of a completed run.
#[derive(Debug, Clone)]
pub struct ProtesOutcome {
    pub best_x: MultiIndex,
    pub best_y: f64,
    pub trace: RunTrace,
    /// The probability model after the last update.
    pub model: TensorTrain,
}

type Admissible<'a> = Box<dyn Fn(&[usize]) -> bool + Send + Sync + 'a>;

/// Configurable optimizer run.
pub struct Protes<'a> {
    config: ProtesConfig,
    init: Option<TensorTrain>,
    admissible: Option<Admissible<'a>>,
    freeze_zeros: bool,
}

impl<'a> Protes<'a> {
    pub fn new(config: ProtesConfig) -> Self {
        Protes {
            config,
            init: None,
            admissible: None,
            freeze_zeros: false,
        }
    }

    /// Starts from `init` instead of a random rank-`R` model.
    pub fn with_init(mut self, init: TensorTrain) -> Self {
        self.init = Some(init);
        self
    }

    /// Drops candidates rejected by `admissible` before top-k selection.
    /// Off by default.
    pub fn with_admissible_filter<F>(mut self, admissible: F) -> Self
    where
        F: Fn(&[usize]) -> bool + Send + Sync + 'a,
    {
        self.admissible = Some(Box::new(admissible));
        self
    }

    /// Keeps core entries that are exactly zero in the starting model at zero
    /// for the whole run. Off by default.
    ///
    /// Adam moves every entry with a nonzero gradient by about `lr`, however
    /// small that gradient is, so an indicator start alone does not keep the
    /// support of the model inside the admissible set.
    pub fn with_frozen_zeros(mut self, freeze: bool) -> Self {
        self.freeze_zeros = freeze;
        self
    }

    pub fn run<P: Problem + ?Sized>(&self, problem: &P) -> Result<ProtesOutcome> {
        self.run_observed(problem, |_| {})
    }

    pub fn run_observed<P, F>(&self, problem: &P, mut observer: F) -> Result<ProtesOutcome>
    where
        P: Problem + ?Sized,
        F: FnMut(&IterationView<'_>),
    {
        let cfg = &self.config;
        cfg.validate()?;
        let shape = problem.shape();
        let mut model = match &self.init {
            Some(init) if init.shape() != shape => {
                return Err(Error::InitShape {
                    init: init.shape().to_vec(),
                    problem: shape.to_vec(),
                })
            }
            Some(init) => init.clone(),
            None => TensorTrain::random(cfg.rank, shape, cfg.seed)?,
        };
        let frozen: Option<Vec<Vec<bool>>> = self
            .freeze_zeros
            .then(|| model.cores().iter().map(|c| c.iter().map(|&g| g == 0.0).collect()).collect());
        let mut adam = AdamState::new(&model, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
        let mut seeds = rng::stream(cfg.seed, rng::STREAM_ITERATIONS);

        let start = Instant::now();
        let mut best: Option<(MultiIndex, f64)> = None;
        let mut trace = RunTrace::default();

        for iter in 0..cfg.iterations() {
            let batch = tt_sample(&model, cfg.samples, seeds.next_u64())?;
            let mut ys = problem.evaluate(&batch.indices);
            debug_assert_eq!(ys.len(), batch.indices.len());
            for y in ys.iter_mut().filter(|y| y.is_nan()) {
                *y = f64::INFINITY;
            }
            if !ys.iter().any(|y| y.is_finite()) {
                return Err(Error::NoFiniteValues);
            }

            let selected = match &self.admissible {
                None => select_top_k(&ys, cfg.top_k)?,
                Some(ok) => {
                    let mut all = select_top_k(&ys, ys.len())?;
                    all.retain(|&j| ok(&batch.indices[j]));
                    all.truncate(cfg.top_k);
                    all
                }
            };

            if let Some(&first) = selected.first() {
                let y = ys[first];
                if y.is_finite() && best.as_ref().is_none_or(|(_, b)| y < *b) {
                    best = Some((batch.indices[first].clone(), y));
                }
            }

            observer(&IterationView {
                iter,
                samples: &batch.indices,
                values: &ys,
                selected: &selected,
                model: &model,
            });

            if !selected.is_empty() {
                let chosen: Vec<MultiIndex> = selected.iter().map(|&j| batch.indices[j].clone()).collect();
                for _ in 0..cfg.gd_steps {
                    let mut grad = match cfg.likelihood {
                        Likelihood::Normalized => normalized_loss_gradient(&model, &chosen)?,
                        Likelihood::Unnormalized => loss_gradient(&model, &chosen)?,
                    };
                    if let Some(frozen) = &frozen {
                        for (g, mask) in grad.iter_mut().zip(frozen) {
                            for (gi, &zero) in g.iter_mut().zip(mask) {
                                if zero {
                                    *gi = 0.0;
                                }
                            }
                        }
                    }
                    adam_step(&mut model, &grad, &mut adam, cfg.lr)?;
                }
            }

            if let Some((x, y)) = &best {
                trace.records.push(TraceRecord {
                    iter,
                    evals: (iter + 1) * cfg.samples,
                    best_y: *y,
                    best_x: x.clone(),
                    t_s: start.elapsed().as_secs_f64(),
                });
            }
        }

        let (best_x, best_y) = best.ok_or(Error::NoFiniteValues)?;
        Ok(ProtesOutcome {
            best_x,
            best_y,
            trace,
            model,
        })
    }
}

/// Runs the optimizer with an optional initial model.
pub fn protes_minimize<P: Problem + ?Sized>(
    problem: &P,
    config: &ProtesConfig,
    init: Option<TensorTrain>,
) -> Result<ProtesOutcome> {
    let mut run = Protes::new(config.clone());
    if let Some(init) = init {
        run = run.with_init(init);
    }
    run.run(problem)
}
