use thiserror::Error;

/// Errors raised by construction and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("empty input")]
    Empty,

    #[error("non-finite entry at index {idx}: {value}")]
    NonFinite { idx: usize, value: f64 },

    #[error("negative entry at index {idx}: {value}")]
    Negative { idx: usize, value: f64 },

    #[error("all weights are zero")]
    ZeroMass,

    #[error("invalid alpha {0}: must be finite, |alpha| <= 1e6, and away from 0 and 1")]
    InvalidAlpha(f64),

    #[error("indeterminate form inf - inf")]
    Indeterminate,

    #[error("pair measure marginals differ at state {state} by {gap:e}")]
    Unbalanced { state: usize, gap: f64 },

    #[error("absolute continuity violated: {0}")]
    NotAbsolutelyContinuous(&'static str),

    #[error("infeasible input: {0}")]
    Infeasible(String),

    #[error("state subset is not an irreducible cyclic class")]
    NotIrreducible,

    #[error("Perron iteration did not converge after {iterations} iterations (spread {spread:e})")]
    PerronNotConverged { iterations: usize, spread: f64 },

    #[error("size guard exceeded: {size} > {limit}")]
    SizeGuard { size: u128, limit: u128 },

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;
