//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by graph construction, the engines, and the verifiers.
#[derive(Debug, Error)]
pub enum Error {
    /// A generator parameter constraint failed. `name` identifies the first
    /// violated constraint, e.g. `"n ≥ (k−h+2)/2"`.
    #[error("constraint violated: {name}")]
    ConstraintViolation { name: &'static str },

    /// A parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),

    /// Malformed graph or label file; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An exact count outgrew the configured decimal-digit cap.
    #[error("digit cap exceeded at step {step}: {digits} digits > cap {cap}")]
    DigitCapExceeded {
        step: usize,
        digits: usize,
        cap: usize,
    },

    /// A run was asked for more timesteps than the configured cap.
    #[error("step cap exceeded: requested {requested} steps > cap {cap}")]
    StepCapExceeded { requested: usize, cap: usize },

    /// A score vector normalized to zero (isolated vertices feeding a parity).
    #[error("degenerate score vector at step {step}")]
    DegenerateScoreVector { step: usize },

    /// Operation requires an undirected (symmetric) graph.
    #[error("graph is not symmetric")]
    NotSymmetric,

    /// Top two per-component eigenvalues are numerically indistinguishable;
    /// the caller must pick the winner (for Γ graphs, Γ̄ wins structurally).
    #[error("ambiguous dominance: top eigenvalues {top} and {second} differ by less than {rel_tol} relative")]
    AmbiguousDominance { top: f64, second: f64, rel_tol: f64 },

    /// A trace is too short for the requested check or measurement.
    #[error("horizon too short for {what}: need {required}, have {available}")]
    HorizonTooShort {
        what: String,
        required: usize,
        available: usize,
    },

    /// The graph does not carry the role labels / shape of a Γ construction.
    #[error("not a Γ graph: {0}")]
    NotGammaGraph(String),

    /// Power iteration failed to meet its tolerance within the iteration cap.
    #[error("eigen iteration limit reached after {iterations} iterations")]
    EigenIterationLimit { iterations: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
