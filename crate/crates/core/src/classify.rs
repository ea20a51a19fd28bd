//! Closed-form sets of unit magnetic vector fields.
//!
//! Unimodular: on the unit sphere the magnetic system reduces to
//! `(c_j - c_k)(mu_i c_i - mu_j mu_k + q) x_j x_k = 0` for each cyclic `(i, j, k)`,
//! together with a harmonic condition that holds on the same sets. The three
//! frame axes always solve it for every charge, the circle in the `(i, j)`
//! plane solves it when `c_i = c_j` (any charge) or when `c_k = 0` (one charge),
//! and the whole sphere solves it when every circle does.
//!
//! Non-unimodular: solutions live in the `(e2, e3)` plane and are cut out by
//! `beta(1+alpha) x2^2 - 2 alpha x2 x3 + beta(1-alpha) x3^2 = 0`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{NonUnimodularStructure, Sign, Structure, UnimodularStructure};
use crate::frame::{Axis, FrameVector};
use crate::magnetic::{self, QConstraint};
use crate::tolerances::{MATCH_CHARGE, SYMMETRY_SNAP};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentKind {
    FullSphere,
    /// Unit vectors in `span(e_i, e_j)`, with `i < j`.
    GreatCircle {
        plane: (Axis, Axis),
    },
    /// `{x, -x}` for a unit `x`.
    PointPair {
        x: FrameVector,
    },
}

impl ComponentKind {
    pub fn circle(i: Axis, j: Axis) -> ComponentKind {
        let plane = if i < j { (i, j) } else { (j, i) };
        ComponentKind::GreatCircle { plane }
    }

    pub fn axis(a: Axis) -> ComponentKind {
        ComponentKind::PointPair { x: a.unit() }
    }

    /// Angular distance from the unit vector `x` to the component.
    pub fn distance(&self, x: FrameVector) -> f64 {
        match self {
            ComponentKind::FullSphere => 0.0,
            ComponentKind::GreatCircle { plane } => {
                let k = plane.0.complement(plane.1).index();
                (x[k].abs() / x.norm()).min(1.0).asin()
            }
            ComponentKind::PointPair { x: p } => p.line_angle(x),
        }
    }

    /// Whether every point of `self` lies on `other`.
    pub fn within(&self, other: &ComponentKind) -> bool {
        match (self, other) {
            (_, ComponentKind::FullSphere) => true,
            (ComponentKind::FullSphere, _) => false,
            (ComponentKind::GreatCircle { plane: a }, ComponentKind::GreatCircle { plane: b }) => a == b,
            (ComponentKind::GreatCircle { .. }, ComponentKind::PointPair { .. }) => false,
            (ComponentKind::PointPair { x }, other) => other.distance(*x) < SYMMETRY_SNAP,
        }
    }

    /// `n` points spread over the component (both points of a pair).
    pub fn sample(&self, n: usize) -> Vec<FrameVector> {
        match self {
            ComponentKind::PointPair { x } => vec![*x, -*x],
            ComponentKind::GreatCircle { plane } => (0..n)
                .map(|m| {
                    let t = std::f64::consts::TAU * m as f64 / n as f64;
                    plane.0.unit() * t.cos() + plane.1.unit() * t.sin()
                })
                .collect(),
            ComponentKind::FullSphere => fibonacci_sphere(n),
        }
    }

    fn order_key(&self) -> (u8, [i64; 3]) {
        match self {
            ComponentKind::PointPair { x } => {
                // canonical representative: first nonzero coordinate positive
                let s = x.to_array().into_iter().find(|v| v.abs() > SYMMETRY_SNAP).unwrap_or(1.0).signum();
                let key = (*x * s).to_array().map(|v| (-v * 1e9).round() as i64);
                (0, key)
            }
            ComponentKind::GreatCircle { plane } => (1, [plane.0.index() as i64, plane.1.index() as i64, 0]),
            ComponentKind::FullSphere => (2, [0; 3]),
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentKind::FullSphere => write!(f, "unit sphere"),
            ComponentKind::GreatCircle { plane } => write!(f, "unit circle in span({}, {})", plane.0, plane.1),
            ComponentKind::PointPair { x } => write!(f, "+/-{x}"),
        }
    }
}

/// `n` nearly uniform points on the unit sphere, deterministic in `n`.
pub fn fibonacci_sphere(n: usize) -> Vec<FrameVector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|m| {
            let z = 1.0 - (2.0 * m as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * m as f64;
            FrameVector::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionComponent {
    pub kind: ComponentKind,
    pub q: QConstraint,
}

impl SolutionComponent {
    pub fn new(kind: ComponentKind, q: QConstraint) -> Self {
        Self { kind, q }
    }

    /// Largest residual of the magnetic system over `n` sample points, at the
    /// component's charge or, for any-charge components, at each of `charges`.
    pub fn max_residual(&self, s: &Structure, n: usize, charges: &[f64]) -> f64 {
        let qs: Vec<f64> = match self.q {
            QConstraint::FixedQ(q) => vec![q],
            QConstraint::AnyQ => charges.to_vec(),
        };
        let mut worst: f64 = 0.0;
        for x in self.kind.sample(n) {
            for &q in &qs {
                let r = magnetic::unit_magnetic_residual(s, x, q).expect("sampled points are unit");
                worst = worst.max(r.max_norm());
            }
        }
        worst
    }
}

impl fmt::Display for SolutionComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.kind, self.q)
    }
}

/// Rows of the unimodular classification, for `c1 >= c2 >= c3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnimodularRow {
    AllEqualNonzero,
    AllZero,
    TopSimpleOthersEqual,
    Heisenberg,
    TopDoubleNonzero,
    TopDoubleZero,
    DistinctPositive,
    DistinctOneNegative,
    DistinctTwoNegative,
    DistinctNegative,
    DistinctLastZero,
    DistinctMiddleZero,
    DistinctFirstZero,
}

impl UnimodularRow {
    pub const ALL: [UnimodularRow; 13] = [
        UnimodularRow::AllEqualNonzero,
        UnimodularRow::AllZero,
        UnimodularRow::TopSimpleOthersEqual,
        UnimodularRow::Heisenberg,
        UnimodularRow::TopDoubleNonzero,
        UnimodularRow::TopDoubleZero,
        UnimodularRow::DistinctPositive,
        UnimodularRow::DistinctOneNegative,
        UnimodularRow::DistinctTwoNegative,
        UnimodularRow::DistinctNegative,
        UnimodularRow::DistinctLastZero,
        UnimodularRow::DistinctMiddleZero,
        UnimodularRow::DistinctFirstZero,
    ];

    /// Row of a triple already sorted so that `c[0] >= c[1] >= c[2]`.
    pub fn of_sorted(c: [f64; 3]) -> UnimodularRow {
        let eq = |a: f64, b: f64| (a - b).abs() < SYMMETRY_SNAP;
        let sign = c.map(Sign::of);
        match (eq(c[0], c[1]), eq(c[1], c[2])) {
            (true, true) if sign[0] == Sign::Zero => UnimodularRow::AllZero,
            (true, true) => UnimodularRow::AllEqualNonzero,
            (false, true) if sign[1] == Sign::Zero => UnimodularRow::Heisenberg,
            (false, true) => UnimodularRow::TopSimpleOthersEqual,
            (true, false) if sign[0] == Sign::Zero => UnimodularRow::TopDoubleZero,
            (true, false) => UnimodularRow::TopDoubleNonzero,
            (false, false) => match sign {
                [_, _, Sign::Zero] => UnimodularRow::DistinctLastZero,
                [_, Sign::Zero, _] => UnimodularRow::DistinctMiddleZero,
                [Sign::Zero, _, _] => UnimodularRow::DistinctFirstZero,
                [Sign::Positive, Sign::Positive, Sign::Positive] => UnimodularRow::DistinctPositive,
                [Sign::Positive, Sign::Positive, Sign::Negative] => UnimodularRow::DistinctOneNegative,
                [Sign::Positive, Sign::Negative, Sign::Negative] => UnimodularRow::DistinctTwoNegative,
                _ => UnimodularRow::DistinctNegative,
            },
        }
    }

    pub fn condition(&self) -> &'static str {
        match self {
            UnimodularRow::AllEqualNonzero => "c1 = c2 = c3 != 0",
            UnimodularRow::AllZero => "c1 = c2 = c3 = 0",
            UnimodularRow::TopSimpleOthersEqual => "c1 > c2 = c3 != 0",
            UnimodularRow::Heisenberg => "c1 > c2 = c3 = 0",
            UnimodularRow::TopDoubleNonzero => "0 != c1 = c2 > c3",
            UnimodularRow::TopDoubleZero => "0 = c1 = c2 > c3",
            UnimodularRow::DistinctPositive => "c1 > c2 > c3 > 0",
            UnimodularRow::DistinctOneNegative => "c1 > c2 > 0 > c3",
            UnimodularRow::DistinctTwoNegative => "c1 > 0 > c2 > c3",
            UnimodularRow::DistinctNegative => "0 > c1 > c2 > c3",
            UnimodularRow::DistinctLastZero => "c1 > c2 > c3 = 0",
            UnimodularRow::DistinctMiddleZero => "c1 > c2 = 0 > c3",
            UnimodularRow::DistinctFirstZero => "0 = c1 > c2 > c3",
        }
    }
}

/// Rows of the non-unimodular classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonUnimodularRow {
    InvariantAboveOne,
    Hyperbolic,
    InvariantOne,
    InvariantBetweenBetaZero,
    InvariantBetweenGeneral,
    InvariantZeroBetaZero,
    InvariantZeroGeneral,
    InvariantNegativeBetaZero,
    InvariantNegativeGeneral,
}

impl NonUnimodularRow {
    pub const ALL: [NonUnimodularRow; 9] = [
        NonUnimodularRow::InvariantAboveOne,
        NonUnimodularRow::Hyperbolic,
        NonUnimodularRow::InvariantOne,
        NonUnimodularRow::InvariantBetweenBetaZero,
        NonUnimodularRow::InvariantBetweenGeneral,
        NonUnimodularRow::InvariantZeroBetaZero,
        NonUnimodularRow::InvariantZeroGeneral,
        NonUnimodularRow::InvariantNegativeBetaZero,
        NonUnimodularRow::InvariantNegativeGeneral,
    ];

    pub fn of(s: &NonUnimodularStructure) -> NonUnimodularRow {
        let snap = |v: f64| v.abs() < SYMMETRY_SNAP;
        let d = s.milnor_invariant();
        let beta_zero = snap(s.beta);
        if snap(s.alpha) {
            return if beta_zero { NonUnimodularRow::Hyperbolic } else { NonUnimodularRow::InvariantAboveOne };
        }
        if snap(s.alpha - 1.0) {
            return if beta_zero {
                NonUnimodularRow::InvariantZeroBetaZero
            } else {
                NonUnimodularRow::InvariantZeroGeneral
            };
        }
        if snap(d - 1.0) {
            return NonUnimodularRow::InvariantOne;
        }
        match (d > 1.0, d > 0.0, beta_zero) {
            (true, _, _) => NonUnimodularRow::InvariantAboveOne,
            (false, true, true) => NonUnimodularRow::InvariantBetweenBetaZero,
            (false, true, false) => NonUnimodularRow::InvariantBetweenGeneral,
            (false, false, true) => NonUnimodularRow::InvariantNegativeBetaZero,
            (false, false, false) => NonUnimodularRow::InvariantNegativeGeneral,
        }
    }

    pub fn condition(&self) -> &'static str {
        match self {
            NonUnimodularRow::InvariantAboveOne => "D > 1",
            NonUnimodularRow::Hyperbolic => "D = 1, alpha = 0, beta = 0",
            NonUnimodularRow::InvariantOne => "D = 1, alpha in (0,1)",
            NonUnimodularRow::InvariantBetweenBetaZero => "D in (0,1), beta = 0",
            NonUnimodularRow::InvariantBetweenGeneral => "D in (0,1), beta != 0",
            NonUnimodularRow::InvariantZeroBetaZero => "D = 0, alpha = 1, beta = 0",
            NonUnimodularRow::InvariantZeroGeneral => "D = 0, alpha = 1, beta != 0",
            NonUnimodularRow::InvariantNegativeBetaZero => "D < 0, beta = 0",
            NonUnimodularRow::InvariantNegativeGeneral => "D < 0, beta != 0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", content = "row", rename_all = "snake_case")]
pub enum CaseLabel {
    Unimodular(UnimodularRow),
    Nonunimodular(NonUnimodularRow),
}

impl CaseLabel {
    pub fn condition(&self) -> &'static str {
        match self {
            CaseLabel::Unimodular(r) => r.condition(),
            CaseLabel::Nonunimodular(r) => r.condition(),
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.condition())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub structure: Structure,
    pub case: CaseLabel,
    pub components: Vec<SolutionComponent>,
}

impl SolutionSet {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Angular distance from `x` to the nearest component admitting charge `q`
    /// (`None` stands for a point that solves the system for every charge).
    pub fn distance(&self, x: FrameVector, q: Option<f64>) -> Option<f64> {
        self.components
            .iter()
            .filter(|c| match q {
                None => c.q.is_any(),
                Some(q) => c.q.admits(q, MATCH_CHARGE),
            })
            .map(|c| c.kind.distance(x))
            .min_by(f64::total_cmp)
    }
}

pub fn classify(s: &Structure) -> SolutionSet {
    match s {
        Structure::Unimodular(u) => classify_unimodular(u),
        Structure::NonUnimodular(n) => classify_nonunimodular(n),
    }
}

/// Solution set of a unimodular structure, reported in the frame the
/// constants were given in. The row label refers to the sorted triple.
pub fn classify_unimodular(s: &UnimodularStructure) -> SolutionSet {
    let c = s.constants();
    let mu = s.mu().to_array();
    let eq = |a: f64, b: f64| (a - b).abs() < SYMMETRY_SNAP;
    let zero = |a: f64| Sign::of(a) == Sign::Zero;

    let mut comps: Vec<SolutionComponent> =
        Axis::ALL.iter().map(|&a| SolutionComponent::new(ComponentKind::axis(a), QConstraint::AnyQ)).collect();

    let mut all_circles = true;
    for k in Axis::ALL {
        let (i, j) = match k {
            Axis::E1 => (Axis::E2, Axis::E3),
            Axis::E2 => (Axis::E1, Axis::E3),
            Axis::E3 => (Axis::E1, Axis::E2),
        };
        let (ci, cj, ck) = (c[i.index()], c[j.index()], c[k.index()]);
        if eq(ci, cj) {
            comps.push(SolutionComponent::new(ComponentKind::circle(i, j), QConstraint::AnyQ));
        } else if zero(ck) {
            let q = QConstraint::FixedQ(mu[i.index()] * mu[j.index()] - mu[k.index()] * ck);
            comps.push(SolutionComponent::new(ComponentKind::circle(i, j), q));
            comps.push(SolutionComponent::new(ComponentKind::axis(k), q));
        } else {
            all_circles = false;
        }
    }

    if all_circles {
        // the charge comes from any equation whose (c_j - c_k) factor survives
        let fixed = (0..3).find(|&i| !eq(c[(i + 1) % 3], c[(i + 2) % 3])).map(|i| {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            mu[j] * mu[k] - mu[i] * c[i]
        });
        let q = fixed.map_or(QConstraint::AnyQ, QConstraint::FixedQ);
        comps.push(SolutionComponent::new(ComponentKind::FullSphere, q));
    }

    let mut sorted = c;
    sorted.sort_by(|a, b| b.total_cmp(a));
    SolutionSet {
        structure: (*s).into(),
        case: CaseLabel::Unimodular(UnimodularRow::of_sorted(sorted)),
        components: prune(comps),
    }
}

/// Drops components whose points all lie on another component with the same
/// charge constraint, then orders the rest deterministically.
fn prune(comps: Vec<SolutionComponent>) -> Vec<SolutionComponent> {
    let mut keep: Vec<SolutionComponent> = Vec::new();
    for (n, c) in comps.iter().enumerate() {
        let redundant = comps.iter().enumerate().any(|(m, o)| {
            m != n
                && c.q.same(&o.q, MATCH_CHARGE)
                && c.kind.within(&o.kind)
                // identical components: keep the first
                && (!o.kind.within(&c.kind) || m < n)
        });
        if !redundant {
            keep.push(*c);
        }
    }
    keep.sort_by(|a, b| {
        a.kind
            .order_key()
            .cmp(&b.kind.order_key())
            .then(a.q.is_any().cmp(&b.q.is_any()).reverse())
            .then(a.q.value().unwrap_or(0.0).total_cmp(&b.q.value().unwrap_or(0.0)))
    });
    keep
}

/// Solution set of a non-unimodular structure `G(alpha, beta)`.
pub fn classify_nonunimodular(s: &NonUnimodularStructure) -> SolutionSet {
    let row = NonUnimodularRow::of(s);
    let (a, b) = (s.alpha, s.beta);
    let pair = |x: FrameVector, q: QConstraint| SolutionComponent::new(ComponentKind::PointPair { x }, q);
    let comps = match row {
        NonUnimodularRow::InvariantAboveOne => Vec::new(),
        NonUnimodularRow::Hyperbolic => {
            vec![SolutionComponent::new(ComponentKind::circle(Axis::E2, Axis::E3), QConstraint::FixedQ(-1.0))]
        }
        NonUnimodularRow::InvariantBetweenBetaZero | NonUnimodularRow::InvariantNegativeBetaZero => vec![
            pair(Axis::E2.unit(), QConstraint::FixedQ(-(1.0 + a).powi(2))),
            pair(Axis::E3.unit(), QConstraint::FixedQ(-(1.0 - a).powi(2))),
        ],
        NonUnimodularRow::InvariantZeroBetaZero => {
            vec![pair(Axis::E2.unit(), QConstraint::FixedQ(-4.0)), pair(Axis::E3.unit(), QConstraint::AnyQ)]
        }
        NonUnimodularRow::InvariantZeroGeneral => vec![
            pair(FrameVector::new(0.0, 1.0, b).normalized().expect("nonzero"), QConstraint::FixedQ(-(b * b + 4.0))),
            pair(Axis::E3.unit(), QConstraint::AnyQ),
        ],
        NonUnimodularRow::InvariantOne => {
            general_solutions(s, true).into_iter().map(|(x, q)| pair(x, QConstraint::FixedQ(q))).collect()
        }
        NonUnimodularRow::InvariantBetweenGeneral | NonUnimodularRow::InvariantNegativeGeneral => {
            general_solutions(s, false).into_iter().map(|(x, q)| pair(x, QConstraint::FixedQ(q))).collect()
        }
    };
    SolutionSet { structure: (*s).into(), case: CaseLabel::Nonunimodular(row), components: prune(comps) }
}

/// Roots of `beta(1+alpha) t^2 - 2 alpha t + beta(1-alpha) = 0` for `t = x2 / x3`
/// with their charges `-(1 + alpha^2(1+beta^2) +/- 2 sqrt(1 - D))`.
/// Needs `beta != 0`; a double root is returned once.
fn general_solutions(s: &NonUnimodularStructure, double: bool) -> Vec<(FrameVector, f64)> {
    let (a, b) = (s.alpha, s.beta);
    let disc = (1.0 - s.milnor_invariant()).max(0.0).sqrt();
    let signs: &[f64] = if double { &[0.0] } else { &[1.0, -1.0] };
    signs
        .iter()
        .map(|&e| {
            let root = e * disc;
            let t = (a + root) / (b * (1.0 + a));
            let x = FrameVector::new(0.0, t, 1.0).normalized().expect("nonzero");
            let q = -(1.0 + a * a * (1.0 + b * b) + 2.0 * root);
            (x, q)
        })
        .collect()
}

/// Coefficient matrix of the linear system in `(x2, x3)` left by the harmonic
/// equations once `x1 != 0` fixes `|nabla X|^2`.
pub fn homogeneous_system(s: &NonUnimodularStructure) -> [[f64; 2]; 2] {
    let (a, b) = (s.alpha, s.beta);
    let ab2 = a * a * b * b;
    [[b * b - (1.0 - a).powi(2) - ab2, -2.0 * b * (1.0 - a)], [2.0 * b * (1.0 + a), b * b - (1.0 + a).powi(2) - ab2]]
}

pub fn homogeneous_determinant(s: &NonUnimodularStructure) -> f64 {
    let m = homogeneous_system(s);
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Left side of `beta(1+alpha) x2^2 - 2 alpha x2 x3 + beta(1-alpha) x3^2 = 0`.
pub fn plane_quadric(s: &NonUnimodularStructure, x2: f64, x3: f64) -> f64 {
    let (a, b) = (s.alpha, s.beta);
    b * (1.0 + a) * x2 * x2 - 2.0 * a * x2 * x3 + b * (1.0 - a) * x3 * x3
}
