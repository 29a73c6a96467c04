use thiserror::Error;

/// Errors produced by the tensor-train model, the sampler and the optimizer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty shape")]
    EmptyShape,

    #[error("zero rank")]
    ZeroRank,

    #[error("mode {mode} has size zero")]
    ZeroModeSize { mode: usize },

    #[error("invalid tensor train: {0}")]
    InvalidTensorTrain(String),

    #[error("index has {got} modes, expected {expected}")]
    IndexLength { expected: usize, got: usize },

    #[error("index out of bounds at mode {mode}: {index} >= {size}")]
    IndexOutOfBounds { mode: usize, index: usize, size: usize },

    #[error("degenerate distribution at mode {mode}")]
    DegenerateDistribution { mode: usize },

    #[error("invalid categorical weights: {0}")]
    InvalidWeights(String),

    #[error("sample count must be positive")]
    ZeroSamples,

    #[error("empty selection")]
    EmptySelection,

    #[error("vanishing likelihood at selected index {position}")]
    VanishingLikelihood { position: usize },

    #[error("non-finite gradient")]
    NonFiniteGradient,

    #[error("gradient shape does not match the tensor train")]
    GradientShape,

    #[error("cannot select {k} of {len} values")]
    SelectionTooLarge { k: usize, len: usize },

    #[error("no finite objective values")]
    NoFiniteValues,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("initial tensor shape {init:?} does not match problem shape {problem:?}")]
    InitShape { init: Vec<usize>, problem: Vec<usize> },

    #[error("unknown problem: {0}")]
    UnknownProblem(String),

    #[error("invalid problem parameters: {0}")]
    InvalidProblem(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
