//! Left-invariant vector fields written in an orthonormal frame `{e1, e2, e3}`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the three frame directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axis {
    E1,
    E2,
    E3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::E1, Axis::E2, Axis::E3];

    pub fn index(self) -> usize {
        match self {
            Axis::E1 => 0,
            Axis::E2 => 1,
            Axis::E3 => 2,
        }
    }

    /// Panics if `i > 2`.
    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }

    /// The axis orthogonal to both `self` and `other` (which must differ).
    pub fn complement(self, other: Axis) -> Axis {
        Axis::from_index(3 - self.index() - other.index())
    }

    pub fn unit(self) -> FrameVector {
        let mut v = FrameVector::ZERO;
        v[self.index()] = 1.0;
        v
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.index() + 1)
    }
}

/// Coefficients `(x1, x2, x3)` of `X = x1 e1 + x2 e2 + x3 e3`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FrameVector {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl FrameVector {
    pub const ZERO: FrameVector = FrameVector::new(0.0, 0.0, 0.0);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn dot(self, other: FrameVector) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2 + self.x3 * other.x3
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn max_abs(self) -> f64 {
        self.x1.abs().max(self.x2.abs()).max(self.x3.abs())
    }

    /// Returns `None` for the zero vector.
    pub fn normalized(self) -> Option<FrameVector> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    pub fn is_unit(self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub(crate) fn require_unit(self, tol: f64) -> Result<()> {
        if self.is_unit(tol) {
            Ok(())
        } else {
            Err(Error::NonUnitVector { norm: self.norm() })
        }
    }

    /// Angle between the lines spanned by `self` and `other` (both unit),
    /// so `x` and `-x` are at distance zero.
    pub fn line_angle(self, other: FrameVector) -> f64 {
        // chord form; acos(|x.y|) loses precision for nearby lines
        let d = (self - other * self.dot(other).signum()).norm();
        2.0 * (0.5 * d).min(1.0).asin()
    }

    pub fn to_vector3(self) -> Vector3<f64> {
        Vector3::new(self.x1, self.x2, self.x3)
    }

    pub fn from_vector3(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl Index<usize> for FrameVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x1,
            1 => &self.x2,
            2 => &self.x3,
            _ => panic!("frame index {i} out of range"),
        }
    }
}

impl IndexMut<usize> for FrameVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        match i {
            0 => &mut self.x1,
            1 => &mut self.x2,
            2 => &mut self.x3,
            _ => panic!("frame index {i} out of range"),
        }
    }
}

impl Add for FrameVector {
    type Output = FrameVector;

    fn add(self, o: FrameVector) -> FrameVector {
        FrameVector::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl AddAssign for FrameVector {
    fn add_assign(&mut self, o: FrameVector) {
        *self = *self + o;
    }
}

impl Sub for FrameVector {
    type Output = FrameVector;

    fn sub(self, o: FrameVector) -> FrameVector {
        FrameVector::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Mul<f64> for FrameVector {
    type Output = FrameVector;

    fn mul(self, s: f64) -> FrameVector {
        FrameVector::new(self.x1 * s, self.x2 * s, self.x3 * s)
    }
}

impl Mul<FrameVector> for f64 {
    type Output = FrameVector;

    fn mul(self, v: FrameVector) -> FrameVector {
        v * self
    }
}

impl Neg for FrameVector {
    type Output = FrameVector;

    fn neg(self) -> FrameVector {
        self * -1.0
    }
}

impl fmt::Display for FrameVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x1, self.x2, self.x3)
    }
}
