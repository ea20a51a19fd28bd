//! Structure constants of 3-dimensional metric Lie algebras.
//!
//! Two normal forms are supported. A unimodular algebra has an orthonormal
//! Milnor frame with
//!
//! ```text
//! [e1, e2] = c3 e3,   [e2, e3] = c1 e1,   [e3, e1] = c2 e2,
//! ```
//!
//! and a non-unimodular algebra, after a homothety, has an orthonormal frame
//! with `e2, e3` spanning the unimodular kernel and
//!
//! ```text
//! [e1, e2] = a11 e2 + a12 e3,   [e1, e3] = a21 e2 + a22 e3,   [e2, e3] = 0,
//! a11 = 1 + alpha,  a12 = (1 + alpha) beta,  a21 = -(1 - alpha) beta,  a22 = 1 - alpha.
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Axis, FrameVector};
use crate::tolerances::SYMMETRY_SNAP;

/// `tensor[i][j][k]` is the `e_k` coefficient of `[e_i, e_j]`.
pub type BracketTensor = [[[f64; 3]; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnimodularStructure {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl UnimodularStructure {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        if [c1, c2, c3].iter().all(|c| c.is_finite()) {
            Ok(Self { c1, c2, c3 })
        } else {
            Err(Error::NonFiniteStructure)
        }
    }

    pub fn from_array(c: [f64; 3]) -> Result<Self> {
        Self::new(c[0], c[1], c[2])
    }

    pub fn constants(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    pub fn mu(&self) -> MuConstants {
        mu_constants(self)
    }
}

impl fmt::Display for UnimodularStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unimodular({}, {}, {})", self.c1, self.c2, self.c3)
    }
}

/// `mu_i = (c1 + c2 + c3) / 2 - c_i`, the Levi-Civita coefficients of a Milnor frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuConstants {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
}

impl MuConstants {
    pub fn to_array(self) -> [f64; 3] {
        [self.mu1, self.mu2, self.mu3]
    }
}

pub fn mu_constants(s: &UnimodularStructure) -> MuConstants {
    let half = 0.5 * (s.c1 + s.c2 + s.c3);
    MuConstants { mu1: half - s.c1, mu2: half - s.c2, mu3: half - s.c3 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonUnimodularStructure {
    pub alpha: f64,
    pub beta: f64,
}

impl NonUnimodularStructure {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::NonFiniteStructure);
        }
        if alpha < 0.0 || beta < 0.0 {
            return Err(Error::NegativeStructure { alpha, beta });
        }
        Ok(Self { alpha, beta })
    }

    /// `D = (1 - alpha^2)(1 + beta^2)`.
    pub fn milnor_invariant(&self) -> f64 {
        milnor_invariant(self)
    }

    pub fn coefficients(&self) -> StructureCoefficients {
        structure_coefficients(self)
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.alpha == 0.0 && self.beta == 0.0
    }
}

impl fmt::Display for NonUnimodularStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nonunimodular({}, {})", self.alpha, self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureCoefficients {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

pub fn milnor_invariant(s: &NonUnimodularStructure) -> f64 {
    (1.0 - s.alpha * s.alpha) * (1.0 + s.beta * s.beta)
}

pub fn structure_coefficients(s: &NonUnimodularStructure) -> StructureCoefficients {
    let (a, b) = (s.alpha, s.beta);
    StructureCoefficients { a11: 1.0 + a, a12: (1.0 + a) * b, a21: -(1.0 - a) * b, a22: 1.0 - a }
}

/// Two normalized non-unimodular algebras other than `(0, 0)` are isomorphic
/// exactly when their Milnor invariants coincide.
pub fn isomorphic(s1: &NonUnimodularStructure, s2: &NonUnimodularStructure) -> Result<bool> {
    if s1.is_hyperbolic() || s2.is_hyperbolic() {
        return Err(Error::HyperbolicExcluded);
    }
    Ok((milnor_invariant(s1) - milnor_invariant(s2)).abs() < 1e-12)
}

/// Either normal form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Structure {
    Unimodular(UnimodularStructure),
    #[serde(rename = "nonunimodular")]
    NonUnimodular(NonUnimodularStructure),
}

impl Structure {
    pub fn unimodular(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        UnimodularStructure::new(c1, c2, c3).map(Structure::Unimodular)
    }

    pub fn nonunimodular(alpha: f64, beta: f64) -> Result<Self> {
        NonUnimodularStructure::new(alpha, beta).map(Structure::NonUnimodular)
    }

    pub fn bracket_tensor(&self) -> BracketTensor {
        let mut t = [[[0.0; 3]; 3]; 3];
        let mut set = |i: usize, j: usize, k: usize, v: f64| {
            t[i][j][k] = v;
            t[j][i][k] = -v;
        };
        match self {
            Structure::Unimodular(s) => {
                set(0, 1, 2, s.c3);
                set(1, 2, 0, s.c1);
                set(2, 0, 1, s.c2);
            }
            Structure::NonUnimodular(s) => {
                let a = s.coefficients();
                set(0, 1, 1, a.a11);
                set(0, 1, 2, a.a12);
                set(0, 2, 1, a.a21);
                set(0, 2, 2, a.a22);
            }
        }
        t
    }

    /// Largest absolute structure constant, used to scale tolerances.
    pub fn magnitude(&self) -> f64 {
        match self {
            Structure::Unimodular(s) => s.c1.abs().max(s.c2.abs()).max(s.c3.abs()),
            Structure::NonUnimodular(s) => {
                let a = s.coefficients();
                a.a11.abs().max(a.a12.abs()).max(a.a21.abs()).max(a.a22.abs())
            }
        }
    }
}

impl From<UnimodularStructure> for Structure {
    fn from(s: UnimodularStructure) -> Self {
        Structure::Unimodular(s)
    }
}

impl From<NonUnimodularStructure> for Structure {
    fn from(s: NonUnimodularStructure) -> Self {
        Structure::NonUnimodular(s)
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Unimodular(s) => s.fmt(f),
            Structure::NonUnimodular(s) => s.fmt(f),
        }
    }
}

/// Bilinear, antisymmetric extension of the frame brackets.
pub fn bracket(s: &Structure, v: FrameVector, w: FrameVector) -> FrameVector {
    bracket_with(&s.bracket_tensor(), v, w)
}

pub(crate) fn bracket_with(t: &BracketTensor, v: FrameVector, w: FrameVector) -> FrameVector {
    // summing over i < j keeps bracket(w, v) = -bracket(v, w) exact in floating point
    let mut out = FrameVector::ZERO;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let vw = v[i] * w[j] - v[j] * w[i];
        if vw == 0.0 {
            continue;
        }
        for k in 0..3 {
            out[k] += vw * t[i][j][k];
        }
    }
    out
}

/// `tr ad(e_i)`.
pub fn ad_trace(s: &Structure, axis: Axis) -> f64 {
    let t = s.bracket_tensor();
    let i = axis.index();
    (0..3).map(|j| t[i][j][j]).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Zero,
    Negative,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x.abs() < SYMMETRY_SNAP {
            Sign::Zero
        } else if x > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    fn flipped(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Zero => Sign::Zero,
            Sign::Negative => Sign::Positive,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Positive => "+",
            Sign::Zero => "0",
            Sign::Negative => "-",
        })
    }
}

/// Simply connected unimodular groups in Milnor's list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnimodularGroup {
    #[serde(rename = "SU(2)")]
    Su2,
    #[serde(rename = "SL(2,R)")]
    Sl2R,
    #[serde(rename = "E(2)")]
    E2,
    #[serde(rename = "E(1,1)")]
    E11,
    Heisenberg,
    Abelian,
}

impl fmt::Display for UnimodularGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnimodularGroup::Su2 => "SU(2)",
            UnimodularGroup::Sl2R => "SL(2,R)",
            UnimodularGroup::E2 => "E(2)",
            UnimodularGroup::E11 => "E(1,1)",
            UnimodularGroup::Heisenberg => "Heisenberg",
            UnimodularGroup::Abelian => "Abelian",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureClass {
    pub group: UnimodularGroup,
    /// Normalized pattern: sorted `+ > 0 > -`, with at least as many `+` as `-`.
    pub pattern: [Sign; 3],
}

/// Milnor's signature table, read "up to numeration": the signs are sorted and,
/// when negative entries outnumber positive ones, flipped globally (reversing
/// the frame orientation negates every structure constant).
pub fn signature_classify(s: &UnimodularStructure) -> SignatureClass {
    let mut pattern = s.constants().map(Sign::of);
    let count = |p: &[Sign; 3], sign| p.iter().filter(|&&x| x == sign).count();
    if count(&pattern, Sign::Negative) > count(&pattern, Sign::Positive) {
        pattern = pattern.map(Sign::flipped);
    }
    pattern.sort();
    use Sign::*;
    let group = match pattern {
        [Positive, Positive, Positive] => UnimodularGroup::Su2,
        [Positive, Positive, Negative] => UnimodularGroup::Sl2R,
        [Positive, Positive, Zero] => UnimodularGroup::E2,
        [Positive, Zero, Negative] => UnimodularGroup::E11,
        [Positive, Zero, Zero] => UnimodularGroup::Heisenberg,
        [Zero, Zero, Zero] => UnimodularGroup::Abelian,
        // After flipping there are at least as many `+` as `-`, so with
        // `+` < `0` < `-` in the derived order the list above is exhaustive.
        _ => unreachable!("unnormalized sign pattern {pattern:?}"),
    };
    SignatureClass { group, pattern }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn uni(c1: f64, c2: f64, c3: f64) -> UnimodularStructure {
        UnimodularStructure::new(c1, c2, c3).unwrap()
    }

    fn nonuni(a: f64, b: f64) -> NonUnimodularStructure {
        NonUnimodularStructure::new(a, b).unwrap()
    }

    #[test]
    fn mu_examples() {
        assert_eq!(uni(1.0, 0.0, 0.0).mu().to_array(), [-0.5, 0.5, 0.5]);
        assert_eq!(uni(0.0, 0.0, 0.0).mu().to_array(), [0.0; 3]);
        assert_eq!(uni(3.0, 3.0, 3.0).mu().to_array(), [1.5; 3]);
    }

    #[test]
    fn signature_examples() {
        assert_eq!(signature_classify(&uni(1.0, 0.0, 0.0)).group, UnimodularGroup::Heisenberg);
        assert_eq!(signature_classify(&uni(1.0, -1.0, 0.0)).group, UnimodularGroup::E11);
        assert_eq!(signature_classify(&uni(0.0, 0.0, 0.0)).group, UnimodularGroup::Abelian);
        assert_eq!(signature_classify(&uni(-1.0, -2.0, -3.0)).group, UnimodularGroup::Su2);
        assert_eq!(signature_classify(&uni(-1.0, 2.0, 3.0)).group, UnimodularGroup::Sl2R);
        assert_eq!(signature_classify(&uni(1.0, -2.0, -3.0)).group, UnimodularGroup::Sl2R);
        assert_eq!(signature_classify(&uni(0.0, -2.0, -3.0)).group, UnimodularGroup::E2);
        assert_eq!(signature_classify(&uni(0.0, 0.0, -3.0)).group, UnimodularGroup::Heisenberg);
        assert_eq!(signature_classify(&uni(0.0, 2.0, 0.0)).group, UnimodularGroup::Heisenberg);
    }

    #[test]
    fn signature_snaps_tiny_constants() {
        let c = signature_classify(&uni(1.0, 1e-12, -1e-10));
        assert_eq!(c.group, UnimodularGroup::Heisenberg);
        assert_eq!(c.pattern, [Sign::Positive, Sign::Zero, Sign::Zero]);
    }

    #[test]
    fn milnor_invariant_examples() {
        assert_abs_diff_eq!(milnor_invariant(&nonuni(0.0, 0.7)), 1.49, epsilon = 1e-15);
        assert_eq!(milnor_invariant(&nonuni(1.0, 3.0)), 0.0);
        assert_abs_diff_eq!(milnor_invariant(&nonuni(0.4, 0.0)), 0.84, epsilon = 1e-15);
    }

    #[test]
    fn coefficient_examples() {
        let c = structure_coefficients(&nonuni(0.0, 0.0));
        assert_eq!((c.a11, c.a12, c.a21, c.a22), (1.0, 0.0, 0.0, 1.0));
        let c = structure_coefficients(&nonuni(1.0, 0.5));
        assert_eq!((c.a11, c.a12, c.a21, c.a22), (2.0, 1.0, 0.0, 0.0));
        let c = structure_coefficients(&nonuni(0.3, 0.0));
        assert_eq!((c.a11, c.a12, c.a21, c.a22), (1.3, 0.0, 0.0, 0.7));
    }

    #[test]
    fn isomorphism_examples() {
        assert_eq!(isomorphic(&nonuni(1.0, 1.0), &nonuni(1.0, 2.0)), Ok(true));
        assert_eq!(isomorphic(&nonuni(0.3, 0.8), &nonuni(0.3, 0.8)), Ok(true));
        assert_eq!(isomorphic(&nonuni(0.5, 0.0), &nonuni(0.0, 0.5)), Ok(false));
        assert_eq!(isomorphic(&nonuni(0.0, 0.0), &nonuni(0.0, 0.5)), Err(Error::HyperbolicExcluded));
    }

    #[test]
    fn rejects_bad_structures() {
        assert!(NonUnimodularStructure::new(-0.1, 0.0).is_err());
        assert!(NonUnimodularStructure::new(0.1, -2.0).is_err());
        assert!(UnimodularStructure::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn bracket_examples() {
        let s = Structure::unimodular(1.0, 2.0, 3.0).unwrap();
        assert_eq!(bracket(&s, Axis::E1.unit(), Axis::E2.unit()), FrameVector::new(0.0, 0.0, 3.0));
        assert_eq!(bracket(&s, Axis::E2.unit(), Axis::E3.unit()), FrameVector::new(1.0, 0.0, 0.0));
        assert_eq!(bracket(&s, Axis::E3.unit(), Axis::E1.unit()), FrameVector::new(0.0, 2.0, 0.0));
        let n = Structure::nonunimodular(0.4, 1.3).unwrap();
        assert_eq!(bracket(&n, Axis::E2.unit(), Axis::E3.unit()), FrameVector::ZERO);
        let v = FrameVector::new(0.3, -1.2, 2.0);
        assert_eq!(bracket(&n, v, v), FrameVector::ZERO);
    }

    #[test]
    fn nonunimodular_trace_property() {
        let s = Structure::nonunimodular(0.7, 1.9).unwrap();
        assert_abs_diff_eq!(ad_trace(&s, Axis::E1), 2.0, epsilon = 1e-15);
        assert_eq!(ad_trace(&s, Axis::E2), 0.0);
        assert_eq!(ad_trace(&s, Axis::E3), 0.0);
    }

    fn any_structure() -> impl Strategy<Value = Structure> {
        prop_oneof![
            (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b, c)| Structure::unimodular(a, b, c).unwrap()),
            (0.0..3.0f64, 0.0..3.0f64).prop_map(|(a, b)| Structure::nonunimodular(a, b).unwrap()),
        ]
    }

    fn any_vector() -> impl Strategy<Value = FrameVector> {
        (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b, c)| FrameVector::new(a, b, c))
    }

    proptest! {
        #[test]
        fn mu_identities(c1 in -5.0..5.0f64, c2 in -5.0..5.0f64, c3 in -5.0..5.0f64) {
            let mu = uni(c1, c2, c3).mu();
            prop_assert!((mu.mu1 + mu.mu2 - c3).abs() < 1e-13);
            prop_assert!((mu.mu2 + mu.mu3 - c1).abs() < 1e-13);
            prop_assert!((mu.mu3 + mu.mu1 - c2).abs() < 1e-13);
        }

        #[test]
        fn coefficient_identities(a in 0.0..3.0f64, b in 0.0..3.0f64) {
            let c = structure_coefficients(&nonuni(a, b));
            prop_assert!((c.a11 + c.a22 - 2.0).abs() < 1e-13);
            prop_assert!((c.a11 * c.a21 + c.a12 * c.a22).abs() < 1e-13);
            prop_assert!((c.a11 * c.a22 - c.a12 * c.a21 - milnor_invariant(&nonuni(a, b))).abs() < 1e-12);
        }

        #[test]
        fn bracket_antisymmetric(s in any_structure(), v in any_vector(), w in any_vector()) {
            let d = bracket(&s, v, w) + bracket(&s, w, v);
            prop_assert!(d.max_abs() < 1e-15);
        }

        #[test]
        fn jacobi_identity(s in any_structure(), u in any_vector(), v in any_vector(), w in any_vector()) {
            let j = bracket(&s, u, bracket(&s, v, w))
                + bracket(&s, v, bracket(&s, w, u))
                + bracket(&s, w, bracket(&s, u, v));
            prop_assert!(j.max_abs() < 1e-12);
        }

        #[test]
        fn unimodular_ad_is_traceless(c1 in -5.0..5.0f64, c2 in -5.0..5.0f64, c3 in -5.0..5.0f64) {
            let s = Structure::unimodular(c1, c2, c3).unwrap();
            for axis in Axis::ALL {
                prop_assert_eq!(ad_trace(&s, axis), 0.0);
            }
        }
    }
}
