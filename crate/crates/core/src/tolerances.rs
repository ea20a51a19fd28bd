//! Numerical thresholds shared across the crate.
//!
//! Every comparison against zero goes through one of these constants so that
//! classification, scanning and verification agree on what "equal" means.

/// Structure constants (and derived case quantities such as `c_i - c_j`,
/// `alpha - 1` or `D - 1`) closer than this are treated as exactly equal.
pub const SYMMETRY_SNAP: f64 = 1e-9;

/// A residual below this value counts as zero when deciding membership.
pub const RESIDUAL: f64 = 1e-9;

/// Threshold on `|nabla_X X|` below which the charge drops out of the first
/// equation in [`crate::magnetic::solve_q`].
pub const CHARGE_COEFFICIENT: f64 = 1e-12;

/// Same role as [`CHARGE_COEFFICIENT`] for points produced by Newton
/// refinement, which only reach the solution to about `1e-13`.
pub const SCAN_ANY_Q: f64 = 1e-10;

/// Unit-length check for frame vectors passed to operations on unit fields.
pub const UNIT_NORM: f64 = 1e-9;

/// Newton refinement stops once the stacked residual drops below this.
pub const NEWTON_RESIDUAL: f64 = 1e-12;

/// Newton refinement stops once a step is shorter than this.
pub const NEWTON_STEP: f64 = 1e-14;

pub const NEWTON_MAX_ITERATIONS: usize = 50;

/// Converged scan points closer than this angle (radians) are merged.
pub const DEDUP_ANGLE: f64 = 1e-6;

/// Angular tolerance when matching scan points against closed-form components.
pub const MATCH_ANGLE: f64 = 1e-6;

/// Charge agreement required between scan and closed form.
pub const MATCH_CHARGE: f64 = 1e-8;

/// Minimum number of distinct scan hits on a circle or sphere component.
pub const MIN_FAMILY_HITS: usize = 8;

/// Overridable thresholds for membership decisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub residual: f64,
    pub charge_coefficient: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { residual: RESIDUAL, charge_coefficient: CHARGE_COEFFICIENT }
    }
}

impl Tolerances {
    pub fn with_residual(residual: f64) -> Self {
        Self { residual, ..Self::default() }
    }
}
