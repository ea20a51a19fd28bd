//! Levi-Civita connection, curvature and Laplacians of left-invariant metrics.
//!
//! Every field here is left-invariant, so covariant derivatives reduce to
//! bilinear expressions in frame coefficients and all directional-derivative
//! terms vanish. The closed-form tables are the primary path; the Koszul and
//! frame-sum routines compute the same objects from the brackets alone and
//! serve as independent oracles.
//!
//! Curvature convention: `R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`,
//! so the sectional curvature of `span(e_i, e_j)` is `g(R(e_i, e_j)e_j, e_i)`.

use serde::{Deserialize, Serialize};

use crate::algebra::{BracketTensor, Structure, UnimodularStructure};
use crate::error::{Error, Result};
use crate::frame::{Axis, FrameVector};
use crate::tolerances::{SYMMETRY_SNAP, UNIT_NORM};

pub type Matrix3 = [[f64; 3]; 3];

/// `gamma[i][j][k]` is the `e_k` coefficient of `nabla_{e_i} e_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionTable {
    pub gamma: [[[f64; 3]; 3]; 3],
}

impl ConnectionTable {
    /// `nabla_Y X`.
    pub fn apply(&self, y: FrameVector, x: FrameVector) -> FrameVector {
        let mut out = FrameVector::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                let yx = y[i] * x[j];
                if yx == 0.0 {
                    continue;
                }
                for k in 0..3 {
                    out[k] += yx * self.gamma[i][j][k];
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &ConnectionTable) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    m = m.max((self.gamma[i][j][k] - other.gamma[i][j][k]).abs());
                }
            }
        }
        m
    }
}

/// `r[i][j][k][l]` is the `e_l` coefficient of `R(e_i, e_j)e_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureTensor {
    pub r: [[[[f64; 3]; 3]; 3]; 3],
}

impl CurvatureTensor {
    /// `R(X, Y)Z`.
    pub fn apply(&self, x: FrameVector, y: FrameVector, z: FrameVector) -> FrameVector {
        let mut out = FrameVector::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for k in 0..3 {
                    let xyz = xy * z[k];
                    if xyz == 0.0 {
                        continue;
                    }
                    for l in 0..3 {
                        out[l] += xyz * self.r[i][j][k][l];
                    }
                }
            }
        }
        out
    }

    pub fn sectional(&self, i: Axis, j: Axis) -> f64 {
        self.r[i.index()][j.index()][j.index()][i.index()]
    }

    /// `Ric(e_j, e_k) = sum_i g(R(e_i, e_j)e_k, e_i)`.
    pub fn ricci_tensor(&self) -> Matrix3 {
        let mut ric = [[0.0; 3]; 3];
        for (j, row) in ric.iter_mut().enumerate() {
            for (k, entry) in row.iter_mut().enumerate() {
                *entry = (0..3).map(|i| self.r[i][j][k][i]).sum();
            }
        }
        ric
    }

    pub fn max_abs_diff(&self, other: &CurvatureTensor) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        m = m.max((self.r[i][j][k][l] - other.r[i][j][k][l]).abs());
                    }
                }
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicciData {
    /// Eigenvalues of the Ricci operator on `e1, e2, e3`.
    pub principal: [f64; 3],
    pub scalar: f64,
}

/// Levi-Civita connection from the Koszul formula
/// `2 g(nabla_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y)` on frame triples.
pub fn koszul_connection(s: &Structure) -> ConnectionTable {
    koszul_from_brackets(&s.bracket_tensor())
}

pub fn koszul_from_brackets(b: &BracketTensor) -> ConnectionTable {
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for (i, gi) in gamma.iter_mut().enumerate() {
        for (j, gij) in gi.iter_mut().enumerate() {
            for (k, g) in gij.iter_mut().enumerate() {
                *g = 0.5 * (b[i][j][k] - b[j][k][i] + b[k][i][j]);
            }
        }
    }
    ConnectionTable { gamma }
}

/// Closed-form connection tables of the two normal forms.
pub fn connection_table(s: &Structure) -> ConnectionTable {
    let mut gamma = [[[0.0; 3]; 3]; 3];
    match s {
        Structure::Unimodular(u) => {
            let mu = u.mu();
            gamma[0][1][2] = mu.mu1;
            gamma[0][2][1] = -mu.mu1;
            gamma[1][0][2] = -mu.mu2;
            gamma[1][2][0] = mu.mu2;
            gamma[2][0][1] = mu.mu3;
            gamma[2][1][0] = -mu.mu3;
        }
        Structure::NonUnimodular(n) => {
            let (a, b) = (n.alpha, n.beta);
            gamma[0][1][2] = b;
            gamma[0][2][1] = -b;
            gamma[1][0][1] = -(1.0 + a);
            gamma[1][0][2] = -a * b;
            gamma[1][1][0] = 1.0 + a;
            gamma[1][2][0] = a * b;
            gamma[2][0][1] = -a * b;
            gamma[2][0][2] = -(1.0 - a);
            gamma[2][1][0] = a * b;
            gamma[2][2][0] = 1.0 - a;
        }
    }
    ConnectionTable { gamma }
}

/// `nabla_Y X` for left-invariant `X`, `Y`.
pub fn nabla(s: &Structure, y: FrameVector, x: FrameVector) -> FrameVector {
    connection_table(s).apply(y, x)
}

/// Curvature from a connection and the brackets, entry by entry from the definition.
pub fn curvature_from_connection(conn: &ConnectionTable, b: &BracketTensor) -> CurvatureTensor {
    let g = &conn.gamma;
    let mut r = [[[[0.0; 3]; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    let mut v = 0.0;
                    for a in 0..3 {
                        v += g[j][k][a] * g[i][a][l] - g[i][k][a] * g[j][a][l] - b[i][j][a] * g[a][k][l];
                    }
                    r[i][j][k][l] = v;
                }
            }
        }
    }
    CurvatureTensor { r }
}

/// Closed-form curvature. In both normal forms the frame diagonalizes Ricci,
/// so in dimension three only the components `R(e_i, e_j)e_i = a_ij e_j` survive.
pub fn curvature(s: &Structure) -> CurvatureTensor {
    let mut r = [[[[0.0; 3]; 3]; 3]; 3];
    let mut put = |i: usize, j: usize, a: f64| {
        r[i][j][i][j] = a;
        r[i][j][j][i] = -a;
        r[j][i][j][i] = a;
        r[j][i][i][j] = -a;
    };
    match s {
        Structure::Unimodular(u) => {
            let [m1, m2, m3] = u.mu().to_array();
            put(0, 1, m1 * m2 - u.c3 * m3);
            put(1, 2, m2 * m3 - u.c1 * m1);
            put(0, 2, m3 * m1 - u.c2 * m2);
        }
        Structure::NonUnimodular(n) => {
            let uvw = crate::magnetic::Uvw::of(n);
            put(0, 1, uvw.u);
            put(0, 2, -uvw.v);
            put(1, 2, uvw.w);
        }
    }
    CurvatureTensor { r }
}

pub fn ricci(s: &Structure) -> RicciData {
    let principal = match s {
        Structure::Unimodular(u) => {
            let [m1, m2, m3] = u.mu().to_array();
            [2.0 * m2 * m3, 2.0 * m3 * m1, 2.0 * m1 * m2]
        }
        Structure::NonUnimodular(n) => {
            let (a, b2) = (n.alpha, n.beta * n.beta);
            [-2.0 * (1.0 + a * a * (1.0 + b2)), -2.0 * (1.0 + a * (1.0 + b2)), -2.0 * (1.0 - a * (1.0 + b2))]
        }
    };
    let scalar = match s {
        Structure::Unimodular(_) => principal.iter().sum(),
        Structure::NonUnimodular(n) => -2.0 * (3.0 + n.alpha * n.alpha * (1.0 + n.beta * n.beta)),
    };
    RicciData { principal, scalar }
}

/// Sectional curvature of the plane `span(e_i, e_j)`.
pub fn sectional(s: &Structure, i: Axis, j: Axis) -> Result<f64> {
    if i == j {
        return Err(Error::RepeatedAxis(i));
    }
    Ok(curvature(s).sectional(i, j))
}

/// Matrix of the rough Laplacian on left-invariant fields: `(Lx)_m = sum_j L[m][j] x_j`.
pub fn rough_laplacian_matrix(s: &Structure) -> Matrix3 {
    match s {
        Structure::Unimodular(u) => {
            let [m1, m2, m3] = u.mu().to_array().map(|m| m * m);
            [[m2 + m3, 0.0, 0.0], [0.0, m3 + m1, 0.0], [0.0, 0.0, m1 + m2]]
        }
        Structure::NonUnimodular(n) => {
            let (a, b) = (n.alpha, n.beta);
            let ab2 = a * a * b * b;
            [
                [2.0 * (1.0 + a * a + ab2), 0.0, 0.0],
                [0.0, b * b + (1.0 + a).powi(2) + ab2, -2.0 * b * (1.0 - a)],
                [0.0, 2.0 * b * (1.0 + a), b * b + (1.0 - a).powi(2) + ab2],
            ]
        }
    }
}

pub(crate) fn mat_vec(m: &Matrix3, x: FrameVector) -> FrameVector {
    FrameVector::new(
        m[0][0] * x.x1 + m[0][1] * x.x2 + m[0][2] * x.x3,
        m[1][0] * x.x1 + m[1][1] * x.x2 + m[1][2] * x.x3,
        m[2][0] * x.x1 + m[2][1] * x.x2 + m[2][2] * x.x3,
    )
}

/// Rough Laplacian `-sum_i (nabla_{e_i} nabla_{e_i} X - nabla_{nabla_{e_i} e_i} X)`.
pub fn rough_laplacian(s: &Structure, x: FrameVector) -> FrameVector {
    mat_vec(&rough_laplacian_matrix(s), x)
}

/// The rough Laplacian evaluated as a frame sum over a connection table.
pub fn rough_laplacian_from_connection(conn: &ConnectionTable, x: FrameVector) -> FrameVector {
    let mut out = FrameVector::ZERO;
    for axis in Axis::ALL {
        let e = axis.unit();
        let twice = conn.apply(e, conn.apply(e, x));
        let along = conn.apply(conn.apply(e, e), x);
        out += along - twice;
    }
    out
}

/// `|nabla X|^2 = g(X, rough_laplacian(X))` for a unit field.
pub fn energy_density(s: &Structure, x: FrameVector) -> Result<f64> {
    x.require_unit(UNIT_NORM)?;
    Ok(x.dot(rough_laplacian(s, x)))
}

/// `sum_i |nabla_{e_i} X|^2`, the pointwise Dirichlet energy density computed directly.
pub fn energy_density_frame_sum(s: &Structure, x: FrameVector) -> f64 {
    let conn = connection_table(s);
    Axis::ALL.iter().map(|a| conn.apply(a.unit(), x).norm_squared()).sum()
}

/// Hodge Laplacian on the dual 1-form: `rough_laplacian(X) + S X`.
pub fn weitzenbock_laplacian(s: &Structure, x: FrameVector) -> FrameVector {
    let rho = ricci(s).principal;
    rough_laplacian(s, x) + FrameVector::new(rho[0] * x.x1, rho[1] * x.x2, rho[2] * x.x3)
}

/// Curvature data of the contact metric structure `xi = e1`, `phi e2 = e3`,
/// `phi e3 = -e2` on a unimodular group with `c1 = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactCurvature {
    /// Constant phi-sectional curvature.
    pub phi_sectional: f64,
    pub kappa: f64,
    pub mu: f64,
}

impl ContactCurvature {
    /// Sasakian exactly when `kappa = 1`.
    pub fn is_sasakian(&self) -> bool {
        (self.kappa - 1.0).abs() < SYMMETRY_SNAP
    }
}

pub fn phi_sectional(s: &UnimodularStructure) -> Result<ContactCurvature> {
    if (s.c1 - 2.0).abs() >= SYMMETRY_SNAP {
        return Err(Error::ContactNormalization { c1: s.c1 });
    }
    let d = s.c2 - s.c3;
    Ok(ContactCurvature {
        phi_sectional: -3.0 + 0.25 * d * d + s.c2 + s.c3,
        kappa: 1.0 - 0.25 * d * d,
        mu: 2.0 - (s.c2 + s.c3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn uni(c1: f64, c2: f64, c3: f64) -> Structure {
        Structure::unimodular(c1, c2, c3).unwrap()
    }

    fn nonuni(a: f64, b: f64) -> Structure {
        Structure::nonunimodular(a, b).unwrap()
    }

    #[test]
    fn abelian_is_flat() {
        let s = uni(0.0, 0.0, 0.0);
        assert_eq!(koszul_connection(&s).gamma, [[[0.0; 3]; 3]; 3]);
        assert_eq!(curvature(&s).r, [[[[0.0; 3]; 3]; 3]; 3]);
        assert_eq!(ricci(&s), RicciData { principal: [0.0; 3], scalar: 0.0 });
        assert_eq!(sectional(&s, Axis::E1, Axis::E3), Ok(0.0));
        let x = FrameVector::new(0.2, -0.9, 0.4);
        assert_eq!(rough_laplacian(&s, x), FrameVector::ZERO);
        assert_eq!(weitzenbock_laplacian(&s, x), FrameVector::ZERO);
    }

    #[test]
    fn connection_entries() {
        let s = uni(1.3, -0.4, 2.2);
        let mu = match s {
            Structure::Unimodular(u) => u.mu(),
            _ => unreachable!(),
        };
        assert_abs_diff_eq!(koszul_connection(&s).gamma[0][1][2], mu.mu1, epsilon = 1e-15);
        let n = nonuni(0.6, 1.7);
        assert_abs_diff_eq!(koszul_connection(&n).gamma[1][0][1], -1.6, epsilon = 1e-15);
        assert_eq!(connection_table(&uni(1.0, 0.0, 0.0)).gamma[2][0][1], 0.5);
        assert_eq!(connection_table(&nonuni(0.0, 0.0)).gamma[1][0][1], -1.0);
        assert_eq!(connection_table(&uni(1.0, 2.0, 3.0)).gamma[0][0], [0.0; 3]);
    }

    #[test]
    fn nabla_examples() {
        let s = uni(2.0, -1.0, 0.5);
        assert_eq!(nabla(&s, Axis::E1.unit(), Axis::E1.unit()), FrameVector::ZERO);
        let (y, x) = (FrameVector::new(0.3, 0.1, -0.7), FrameVector::new(1.0, 2.0, 0.5));
        let lhs = nabla(&s, y * 2.0, x);
        let rhs = nabla(&s, y, x) * 2.0;
        assert!((lhs - rhs).max_abs() < 1e-15);
        // Sol3: mu2 = 1
        assert_eq!(nabla(&uni(1.0, -1.0, 0.0), Axis::E2.unit(), Axis::E3.unit()), Axis::E1.unit());
    }

    #[test]
    fn curvature_entries() {
        let (c1, c2, c3) = (1.5, -0.5, 0.75);
        let s = uni(c1, c2, c3);
        let half = 0.5 * (c1 + c2 + c3);
        let (m1, m2, m3) = (half - c1, half - c2, half - c3);
        let r = curvature(&s).apply(Axis::E1.unit(), Axis::E2.unit(), Axis::E1.unit());
        assert_abs_diff_eq!(r.x2, m1 * m2 - c3 * m3, epsilon = 1e-15);
        assert_eq!((r.x1, r.x3), (0.0, 0.0));

        let beta = 0.8;
        let n = nonuni(1.0, beta);
        assert_abs_diff_eq!(sectional(&n, Axis::E1, Axis::E3).unwrap(), beta * beta, epsilon = 1e-14);
        assert_abs_diff_eq!(sectional(&n, Axis::E2, Axis::E3).unwrap(), beta * beta, epsilon = 1e-14);
        assert_abs_diff_eq!(sectional(&n, Axis::E1, Axis::E2).unwrap(), -3.0 * beta * beta - 4.0, epsilon = 1e-14);
    }

    #[test]
    fn sectional_rejects_repeated_axis() {
        assert_eq!(sectional(&uni(1.0, 1.0, 1.0), Axis::E2, Axis::E2), Err(Error::RepeatedAxis(Axis::E2)));
    }

    #[test]
    fn sectional_is_symmetric() {
        let s = nonuni(0.3, 2.1);
        for i in Axis::ALL {
            for j in Axis::ALL {
                if i != j {
                    assert_eq!(sectional(&s, i, j), sectional(&s, j, i));
                }
            }
        }
    }

    #[test]
    fn ricci_examples() {
        assert_eq!(ricci(&uni(1.0, 0.0, 0.0)).principal, [0.5, -0.5, -0.5]);
        let (a, b) = (0.7, 1.4);
        let r = ricci(&nonuni(a, b));
        assert_abs_diff_eq!(r.scalar, -2.0 * (3.0 + a * a * (1.0 + b * b)), epsilon = 1e-14);
        assert_abs_diff_eq!(r.scalar, r.principal.iter().sum::<f64>(), epsilon = 1e-12);
    }

    #[test]
    fn rough_laplacian_examples() {
        let s = uni(3.0, 1.0, -2.0);
        let mu = [-2.0, 0.0, 3.0];
        assert_eq!(rough_laplacian(&s, Axis::E1.unit()), Axis::E1.unit() * (mu[1] * mu[1] + mu[2] * mu[2]));
        let (a, b) = (0.4, 0.9);
        assert_abs_diff_eq!(
            rough_laplacian(&nonuni(a, b), Axis::E1.unit()).x1,
            2.0 * (1.0 + a * a + a * a * b * b),
            epsilon = 1e-15
        );
    }

    #[test]
    fn energy_density_examples() {
        let (a, b) = (0.35, 1.2);
        let s = nonuni(a, b);
        let x = FrameVector::new(0.48, -0.6, 0.64);
        let (x1, x2, x3) = (x.x1, x.x2, x.x3);
        let expected = 2.0 * x1 * x1 * (1.0 + a * a + a * a * b * b)
            + x2 * x2 * (b * b + (1.0 + a).powi(2) + a * a * b * b)
            + x3 * x3 * (b * b + (1.0 - a).powi(2) + a * a * b * b)
            + 4.0 * x2 * x3 * a * b;
        assert_abs_diff_eq!(energy_density(&s, x).unwrap(), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(energy_density_frame_sum(&s, x), expected, epsilon = 1e-14);
        assert_eq!(energy_density(&uni(0.0, 0.0, 0.0), x), Ok(0.0));
        let u = uni(2.0, 0.5, -1.0);
        let mu = [-1.25, 0.25, 1.75];
        assert_abs_diff_eq!(
            energy_density(&u, Axis::E1.unit()).unwrap(),
            mu[1] * mu[1] + mu[2] * mu[2],
            epsilon = 1e-15
        );
        assert!(matches!(energy_density(&u, x * 2.0), Err(Error::NonUnitVector { .. })));
    }

    #[test]
    fn weitzenbock_example() {
        // rough Laplacian eigenvalue 1/2 plus rho1 = 1/2
        let w = weitzenbock_laplacian(&uni(1.0, 0.0, 0.0), Axis::E1.unit());
        assert_abs_diff_eq!(w.x1, 1.0, epsilon = 1e-15);
        assert_eq!((w.x2, w.x3), (0.0, 0.0));
    }

    #[test]
    fn weitzenbock_is_linear() {
        let s = nonuni(1.3, 0.2);
        let (x, y) = (FrameVector::new(1.0, -2.0, 0.5), FrameVector::new(0.3, 0.3, 4.0));
        let d = weitzenbock_laplacian(&s, x * 3.0 + y)
            - (weitzenbock_laplacian(&s, x) * 3.0 + weitzenbock_laplacian(&s, y));
        assert!(d.max_abs() < 1e-13);
    }

    #[test]
    fn contact_examples() {
        let c = phi_sectional(&UnimodularStructure::new(2.0, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!((c.phi_sectional, c.kappa), (-1.0, 1.0));
        assert!(c.is_sasakian());
        let c = phi_sectional(&UnimodularStructure::new(2.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!((c.phi_sectional, c.kappa, c.mu), (-3.0, 1.0, 2.0));
        let c = phi_sectional(&UnimodularStructure::new(2.0, -3.5, -3.5).unwrap()).unwrap();
        assert_eq!(c.kappa, 1.0);
        assert!(matches!(
            phi_sectional(&UnimodularStructure::new(1.0, 1.0, 1.0).unwrap()),
            Err(Error::ContactNormalization { .. })
        ));
    }

    #[test]
    fn phi_sectional_is_the_e2_e3_sectional_curvature() {
        for (c2, c3) in [(0.3, -1.1), (2.0, 2.0), (-0.7, 4.2)] {
            let u = UnimodularStructure::new(2.0, c2, c3).unwrap();
            let k23 = sectional(&u.into(), Axis::E2, Axis::E3).unwrap();
            assert_abs_diff_eq!(phi_sectional(&u).unwrap().phi_sectional, k23, epsilon = 1e-13);
        }
    }
}
