//! Left-invariant Riemannian geometry of three-dimensional Lie groups and
//! classification of left-invariant unit magnetic vector fields.
//!
//! Structures come in two normal forms: a Milnor frame for unimodular
//! algebras ([`UnimodularStructure`]) and the `(alpha, beta)` family of
//! non-unimodular algebras ([`NonUnimodularStructure`]). Vector fields are
//! triples of frame coefficients ([`FrameVector`]).

pub mod algebra;
pub mod classify;
pub mod compare;
pub mod error;
pub mod frame;
pub mod geometry;
pub mod magnetic;
pub mod parallel;
pub mod reproduce;
pub mod scan;
pub mod tolerances;

pub use algebra::{NonUnimodularStructure, Structure, UnimodularStructure};
pub use classify::{classify, ComponentKind, SolutionComponent, SolutionSet};
pub use compare::{compare, MatchReport};
pub use error::{Error, Result};
pub use frame::{Axis, FrameVector};
pub use magnetic::{QConstraint, ResidualPair};
pub use parallel::Execution;
pub use scan::{numeric_scan, QMode, ScanResult};
