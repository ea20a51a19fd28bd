use thiserror::Error;

use crate::frame::Axis;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector field must have unit length, got |x| = {norm}")]
    NonUnitVector { norm: f64 },

    #[error("structure constants must be finite")]
    NonFiniteStructure,

    #[error("non-unimodular structure constants must satisfy alpha >= 0 and beta >= 0, got ({alpha}, {beta})")]
    NegativeStructure { alpha: f64, beta: f64 },

    #[error("the isomorphism criterion does not apply to the hyperbolic algebra (0, 0)")]
    HyperbolicExcluded,

    #[error("a sectional curvature needs two distinct axes, got {0} twice")]
    RepeatedAxis(Axis),

    #[error("contact data is defined only for c1 = 2, got c1 = {c1}")]
    ContactNormalization { c1: f64 },

    #[error("grid resolution must be at least {min}, got {got}")]
    GridTooSmall { got: usize, min: usize },

    #[error("solution set and scan were computed for different structures")]
    StructureMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
