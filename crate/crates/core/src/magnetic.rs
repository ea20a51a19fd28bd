//! Residuals of the magnetic map equations for left-invariant fields.
//!
//! A unit field `X` is magnetic with charge `q` when
//! `tr R(nabla_. X, X). - q nabla_X X = 0` and `rough_laplacian(X) = |nabla X|^2 X`.
//! The sign in front of `q` is the one under which the Milnor-frame systems
//! read `(mu1 c1 - mu2 mu3 + q)(c2 - c3) x2 x3 = 0` and cyclic, so reported
//! charges carry the same signs as the classification tables.

use serde::{Deserialize, Serialize};

use crate::algebra::{NonUnimodularStructure, Structure};
use crate::error::Result;
use crate::frame::{Axis, FrameVector};
use crate::geometry::{self, mat_vec, ConnectionTable, CurvatureTensor, Matrix3};
use crate::tolerances::{Tolerances, UNIT_NORM};

/// Abbreviations for the non-unimodular curvature components:
/// `R(e1,e2)e1 = u e2`, `R(e1,e3)e1 = -v e3`, `R(e2,e3)e2 = w e3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uvw {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl Uvw {
    pub fn of(s: &NonUnimodularStructure) -> Uvw {
        let (a, b2) = (s.alpha, s.beta * s.beta);
        Uvw {
            u: a * b2 + (1.0 + a).powi(2) + a * b2 * (1.0 + a),
            v: a * b2 - (1.0 - a).powi(2) + a * b2 * (1.0 - a),
            w: 1.0 - a * a * (1.0 + b2),
        }
    }
}

/// The charge attached to a solution: either any real `q` works or exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value")]
pub enum QConstraint {
    AnyQ,
    FixedQ(f64),
}

impl QConstraint {
    pub fn value(&self) -> Option<f64> {
        match self {
            QConstraint::AnyQ => None,
            QConstraint::FixedQ(q) => Some(*q),
        }
    }

    pub fn is_any(&self) -> bool {
        matches!(self, QConstraint::AnyQ)
    }

    pub fn admits(&self, q: f64, tol: f64) -> bool {
        match self {
            QConstraint::AnyQ => true,
            QConstraint::FixedQ(v) => (v - q).abs() < tol,
        }
    }

    /// Whether both constraints can hold at once.
    pub fn compatible(&self, other: &QConstraint, tol: f64) -> bool {
        match (self, other) {
            (QConstraint::FixedQ(a), QConstraint::FixedQ(b)) => (a - b).abs() < tol,
            _ => true,
        }
    }

    pub fn same(&self, other: &QConstraint, tol: f64) -> bool {
        match (self, other) {
            (QConstraint::AnyQ, QConstraint::AnyQ) => true,
            (QConstraint::FixedQ(a), QConstraint::FixedQ(b)) => (a - b).abs() < tol,
            _ => false,
        }
    }
}

impl std::fmt::Display for QConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QConstraint::AnyQ => write!(f, "any q"),
            QConstraint::FixedQ(q) => write!(f, "q = {q}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualPair {
    /// Curvature-trace equation.
    pub first: FrameVector,
    /// Rough-Laplacian equation.
    pub second: FrameVector,
}

impl ResidualPair {
    pub fn max_norm(&self) -> f64 {
        self.first.norm().max(self.second.norm())
    }

    pub fn vanishes(&self, tol: f64) -> bool {
        self.max_norm() < tol
    }
}

/// `sum_i R(nabla_{e_i} X, X) e_i`, closed form.
pub fn curvature_trace(s: &Structure, x: FrameVector) -> FrameVector {
    let FrameVector { x1, x2, x3 } = x;
    match s {
        Structure::Unimodular(u) => {
            let [m1, m2, m3] = u.mu().to_array();
            let (c1, c2, c3) = (u.c1, u.c2, u.c3);
            FrameVector::new(
                (c2 - c3) * (m1 * c1 - m2 * m3) * x2 * x3,
                (c3 - c1) * (m2 * c2 - m3 * m1) * x3 * x1,
                (c1 - c2) * (m3 * c3 - m1 * m2) * x1 * x2,
            )
        }
        Structure::NonUnimodular(n) => {
            let (a, b) = (n.alpha, n.beta);
            let Uvw { u, v, w } = Uvw::of(n);
            FrameVector::new(
                -(x2 * (1.0 + a) + x3 * a * b) * x2 * u - x1 * x1 * (1.0 + a) * u
                    + (x2 * a * b + x3 * (1.0 - a)) * x3 * v
                    + x1 * x1 * (1.0 - a) * v,
                x1 * (b * x3 * u + w * (a * b * x3 + (a - 1.0) * x2)),
                x1 * x2 * b * v - x1 * x3 * (1.0 + a) * w + x1 * x2 * a * b * w,
            )
        }
    }
}

/// `sum_i R(nabla_{e_i} X, X) e_i` from arbitrary connection and curvature tables.
pub fn curvature_trace_from_tables(conn: &ConnectionTable, curv: &CurvatureTensor, x: FrameVector) -> FrameVector {
    let mut out = FrameVector::ZERO;
    for axis in Axis::ALL {
        let e = axis.unit();
        out += curv.apply(conn.apply(e, x), x, e);
    }
    out
}

/// `nabla_X X`, closed form.
pub fn self_derivative(s: &Structure, x: FrameVector) -> FrameVector {
    let FrameVector { x1, x2, x3 } = x;
    match s {
        Structure::Unimodular(u) => {
            let [m1, m2, m3] = u.mu().to_array();
            FrameVector::new((m2 - m3) * x2 * x3, (m3 - m1) * x3 * x1, (m1 - m2) * x1 * x2)
        }
        Structure::NonUnimodular(n) => {
            let (a, b) = (n.alpha, n.beta);
            FrameVector::new(
                (1.0 + a) * x2 * x2 + (1.0 - a) * x3 * x3 + 2.0 * a * b * x2 * x3,
                -(1.0 + a) * x1 * (x2 + b * x3),
                (1.0 - a) * x1 * (b * x2 - x3),
            )
        }
    }
}

fn first_residual(s: &Structure, x: FrameVector, q: f64) -> FrameVector {
    curvature_trace(s, x) - self_derivative(s, x) * q
}

fn harmonic_part(s: &Structure, x: FrameVector) -> FrameVector {
    let lap = geometry::rough_laplacian(s, x);
    lap - x * x.dot(lap)
}

pub fn unit_magnetic_residual(s: &Structure, x: FrameVector, q: f64) -> Result<ResidualPair> {
    x.require_unit(UNIT_NORM)?;
    Ok(ResidualPair { first: first_residual(s, x, q), second: harmonic_part(s, x) })
}

/// The magnetic system for a field of arbitrary length viewed as a map into `TM`.
pub fn tm_magnetic_residual(s: &Structure, x: FrameVector, q: f64) -> ResidualPair {
    ResidualPair { first: first_residual(s, x, q), second: lh_critical_residual(s, x, q) }
}

/// `rough_laplacian(X) + q X`.
pub fn lh_critical_residual(s: &Structure, x: FrameVector, q: f64) -> FrameVector {
    geometry::rough_laplacian(s, x) + x * q
}

/// `rough_laplacian(X) - |nabla X|^2 X`.
pub fn harmonic_unit_residual(s: &Structure, x: FrameVector) -> Result<FrameVector> {
    x.require_unit(UNIT_NORM)?;
    Ok(harmonic_part(s, x))
}

/// Extracts the charge for which `x` is magnetic, if any.
pub fn solve_q(s: &Structure, x: FrameVector) -> Result<Option<QConstraint>> {
    solve_q_with(s, x, &Tolerances::default())
}

pub fn solve_q_with(s: &Structure, x: FrameVector, tol: &Tolerances) -> Result<Option<QConstraint>> {
    x.require_unit(UNIT_NORM)?;
    if harmonic_part(s, x).norm() >= tol.residual {
        return Ok(None);
    }
    let a = curvature_trace(s, x);
    let b = self_derivative(s, x);
    Ok(charge_from_parts(a, b, tol.charge_coefficient, tol.residual))
}

/// Least-squares charge for `a = q b`.
pub(crate) fn charge_from_parts(
    a: FrameVector,
    b: FrameVector,
    coefficient_tol: f64,
    residual_tol: f64,
) -> Option<QConstraint> {
    let bb = b.norm_squared();
    if bb.sqrt() < coefficient_tol {
        return (a.norm() < coefficient_tol).then_some(QConstraint::AnyQ);
    }
    let q = a.dot(b) / bb;
    ((a - b * q).norm() < residual_tol).then_some(QConstraint::FixedQ(q))
}

/// The magnetic system as quadratic forms in `x`, assembled from connection
/// and curvature tables so that residuals and Jacobians cost a few dozen flops.
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticForms {
    /// `trace_m = sum_{j,k} trace[m][j][k] x_j x_k`.
    pub trace: [[[f64; 3]; 3]; 3],
    /// `(nabla_X X)_m = sum_{j,k} derivative[m][j][k] x_j x_k`.
    pub derivative: [[[f64; 3]; 3]; 3],
    pub laplacian: Matrix3,
}

fn quadratic(t: &[[[f64; 3]; 3]; 3], x: FrameVector) -> FrameVector {
    let mut out = FrameVector::ZERO;
    for m in 0..3 {
        let mut v = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                v += t[m][j][k] * x[j] * x[k];
            }
        }
        out[m] = v;
    }
    out
}

fn quadratic_jacobian(t: &[[[f64; 3]; 3]; 3], x: FrameVector) -> Matrix3 {
    let mut jac = [[0.0; 3]; 3];
    for m in 0..3 {
        for p in 0..3 {
            jac[m][p] = (0..3).map(|k| (t[m][p][k] + t[m][k][p]) * x[k]).sum();
        }
    }
    jac
}

impl MagneticForms {
    pub fn new(s: &Structure) -> MagneticForms {
        Self::from_tables(&geometry::connection_table(s), &geometry::curvature(s), geometry::rough_laplacian_matrix(s))
    }

    pub fn from_tables(conn: &ConnectionTable, curv: &CurvatureTensor, laplacian: Matrix3) -> MagneticForms {
        let g = &conn.gamma;
        let r = &curv.r;
        let mut trace = [[[0.0; 3]; 3]; 3];
        let mut derivative = [[[0.0; 3]; 3]; 3];
        for m in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let mut v = 0.0;
                    for i in 0..3 {
                        for a in 0..3 {
                            v += g[i][j][a] * r[a][k][i][m];
                        }
                    }
                    trace[m][j][k] = v;
                    derivative[m][j][k] = g[j][k][m];
                }
            }
        }
        MagneticForms { trace, derivative, laplacian }
    }

    pub fn curvature_trace(&self, x: FrameVector) -> FrameVector {
        quadratic(&self.trace, x)
    }

    pub fn self_derivative(&self, x: FrameVector) -> FrameVector {
        quadratic(&self.derivative, x)
    }

    /// `L x - (x^T L x) x`.
    pub fn harmonic(&self, x: FrameVector) -> FrameVector {
        let lx = mat_vec(&self.laplacian, x);
        lx - x * x.dot(lx)
    }

    pub fn trace_jacobian(&self, x: FrameVector) -> Matrix3 {
        quadratic_jacobian(&self.trace, x)
    }

    pub fn derivative_jacobian(&self, x: FrameVector) -> Matrix3 {
        quadratic_jacobian(&self.derivative, x)
    }

    pub fn harmonic_jacobian(&self, x: FrameVector) -> Matrix3 {
        let l = &self.laplacian;
        let lx = mat_vec(l, x);
        let ltx = FrameVector::new(
            l[0][0] * x.x1 + l[1][0] * x.x2 + l[2][0] * x.x3,
            l[0][1] * x.x1 + l[1][1] * x.x2 + l[2][1] * x.x3,
            l[0][2] * x.x1 + l[1][2] * x.x2 + l[2][2] * x.x3,
        );
        let energy = x.dot(lx);
        let grad = lx + ltx;
        let mut jac = [[0.0; 3]; 3];
        for m in 0..3 {
            for p in 0..3 {
                jac[m][p] = l[m][p] - grad[p] * x[m] - if m == p { energy } else { 0.0 };
            }
        }
        jac
    }
}
