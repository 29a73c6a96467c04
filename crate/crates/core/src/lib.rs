//! Gradient-free discrete optimization by sampling from a probability model
//! stored in tensor-train format.
//!
//! Each iteration draws `K` candidates from the model, evaluates the black-box
//! objective, keeps the `k` best and takes Adam steps that raise their
//! log-likelihood under the model. Constraints expressible as a finite
//! automaton are handled by starting from an exact 0/1 indicator tensor.

pub mod cli;
pub mod constraints;
pub mod error;
pub mod learner;
pub mod problems;
pub mod rng;
pub mod sampler;
pub mod tensor_train;

pub use error::{Error, Result};
pub use learner::{protes_minimize, Likelihood, Protes, ProtesConfig, ProtesOutcome, RunTrace};
pub use problems::Problem;
pub use sampler::{categorical_draw, tt_sample, SampleBatch};
pub use tensor_train::{MultiIndex, TensorTrain};
