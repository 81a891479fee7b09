use thiserror::Error;

use crate::rationality::Cycle;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coordinate {coordinate} must be strictly positive, got {value}")]
    NonPositive { coordinate: usize, value: f64 },

    #[error("non-finite value {value} at coordinate {coordinate}")]
    NonFinite { coordinate: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("negative cycle {:?} with sum {}", .0.indices, .0.sum)]
    NegativeCycle(Cycle),

    #[error("Afriat inequalities are infeasible (phase-one residual {residual:e})")]
    AfriatInfeasible { residual: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("enumeration refused: size {size} exceeds cap {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("marginals are unbalanced: source mass {source_mass}, target mass {target_mass}")]
    Unbalanced { source_mass: f64, target_mass: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point leaves the positive orthant at coordinate {coordinate}")]
    DomainExit { coordinate: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
