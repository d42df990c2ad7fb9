//! Real 2x2 matrix kernel: algebra, invariants, conjugation, real canonical
//! forms and evaluation of scalar-coefficient polynomials at a matrix.

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::rpoly::RealPoly;
use crate::tol::Tolerances;

/// A real 2x2 matrix `[[e11, e12], [e21, e22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(into = "[f64; 4]", try_from = "[f64; 4]")
)]
pub struct Mat2 {
    pub e11: f64,
    pub e12: f64,
    pub e21: f64,
    pub e22: f64,
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2::new(0.0, 0.0, 0.0, 0.0);
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

    /// Row-major constructor.
    pub const fn new(e11: f64, e12: f64, e21: f64, e22: f64) -> Self {
        Self { e11, e12, e21, e22 }
    }

    pub const fn from_rows(rows: [[f64; 2]; 2]) -> Self {
        Self::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    pub const fn to_array(self) -> [f64; 4] {
        [self.e11, self.e12, self.e21, self.e22]
    }

    /// `p * I`
    pub const fn scalar(p: f64) -> Self {
        Self::new(p, 0.0, 0.0, p)
    }

    /// `D(p, q)`
    pub const fn diag(p: f64, q: f64) -> Self {
        Self::new(p, 0.0, 0.0, q)
    }

    /// `J(p)`, the upper Jordan block.
    pub const fn jordan(p: f64) -> Self {
        Self::new(p, 1.0, 0.0, p)
    }

    /// `R(a, b) = [[a, b], [-b, a]]`, the real form of `a ± ib`.
    pub const fn rotation(a: f64, b: f64) -> Self {
        Self::new(a, b, -b, a)
    }

    /// `C(phi) = [[cos, sin], [-sin, cos]]`
    pub fn givens(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self::new(c, s, -s, c)
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn det(&self) -> f64 {
        self.e11 * self.e22 - self.e12 * self.e21
    }

    pub fn trace(&self) -> f64 {
        self.e11 + self.e22
    }

    /// `trace^2 - 4 det`, computed as `(e11 - e22)^2 + 4 e12 e21` to avoid
    /// cancelling the diagonal.
    pub fn discriminant(&self) -> f64 {
        let d = self.e11 - self.e22;
        d * d + 4.0 * self.e12 * self.e21
    }

    pub fn norm(&self) -> f64 {
        self.to_array().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn distance(&self, other: &Mat2) -> f64 {
        (*self - *other).norm()
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.e11, self.e21, self.e12, self.e22)
    }

    pub fn adjugate(&self) -> Self {
        Self::new(self.e22, -self.e12, -self.e21, self.e11)
    }

    /// Inverse, refusing matrices with `|det| <= eps_singular * ||C||^2`.
    pub fn inverse(&self, eps_singular: f64) -> Result<Self> {
        let det = self.det();
        let n = self.norm();
        if !(det.abs() > eps_singular * n * n) {
            return Err(Error::SingularTransform { det });
        }
        Ok(self.adjugate() * (1.0 / det))
    }

    /// Frobenius norm of the deviation from the nearest scalar matrix.
    pub fn nonscalar_part(&self) -> f64 {
        let half = 0.5 * (self.e11 - self.e22);
        (2.0 * half * half + self.e12 * self.e12 + self.e21 * self.e21).sqrt()
    }

    pub fn is_scalar(&self, tol: &Tolerances) -> bool {
        self.nonscalar_part() <= tol.eps_disc * 1f64.max(self.norm())
    }

    /// Floating-point eigen-structure of the matrix.
    pub fn spectrum(&self, tol: &Tolerances) -> Spectrum {
        let tr = self.trace();
        let det = self.det();
        let disc = self.discriminant();
        let d = self.e11 - self.e22;
        let rounding = 1e3 * f64::EPSILON * (d * d + 4.0 * (self.e12 * self.e21).abs());
        let zero_band = tol.eps_disc * 1f64.max(tr * tr).max(det.abs()) + rounding;
        if disc.abs() <= zero_band {
            let p = 0.5 * tr;
            if self.is_scalar(tol) {
                Spectrum::Scalar(p)
            } else {
                Spectrum::Jordan(p)
            }
        } else if disc > 0.0 {
            let s = disc.sqrt();
            Spectrum::Split(0.5 * (tr - s), 0.5 * (tr + s))
        } else {
            Spectrum::Complex(0.5 * tr, 0.5 * (-disc).sqrt())
        }
    }
}

impl From<Mat2> for [f64; 4] {
    fn from(m: Mat2) -> Self {
        m.to_array()
    }
}

impl TryFrom<[f64; 4]> for Mat2 {
    type Error = Error;

    fn try_from(v: [f64; 4]) -> Result<Self> {
        let m = Mat2::new(v[0], v[1], v[2], v[3]);
        if m.is_finite() {
            Ok(m)
        } else {
            Err(Error::InvalidInput(alloc::format!("matrix entries must be finite: {v:?}")))
        }
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.e11, self.e12, self.e21, self.e22)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.e11 + o.e11, self.e12 + o.e12, self.e21 + o.e21, self.e22 + o.e22)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.e11 - o.e11, self.e12 - o.e12, self.e21 - o.e21, self.e22 - o.e22)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.e11, -self.e12, -self.e21, -self.e22)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.e11 * o.e11 + self.e12 * o.e21,
            self.e11 * o.e12 + self.e12 * o.e22,
            self.e21 * o.e11 + self.e22 * o.e21,
            self.e21 * o.e12 + self.e22 * o.e22,
        )
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, k: f64) -> Mat2 {
        Mat2::new(self.e11 * k, self.e12 * k, self.e21 * k, self.e22 * k)
    }
}

/// Eigen-structure of a real 2x2 matrix, decided by the sign of the
/// discriminant and the scalar test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spectrum {
    /// `p * I`
    Scalar(f64),
    /// Double eigenvalue `p`, not diagonalizable.
    Jordan(f64),
    /// Real eigenvalues `p < q`.
    Split(f64, f64),
    /// Eigenvalues `a ± ib`, `b > 0`.
    Complex(f64, f64),
}

/// Real canonical representative of a similarity class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CanonicalKind {
    /// `D(p, q)` with `p <= q`.
    Diagonal { p: f64, q: f64 },
    /// `J(p)`
    Jordan { p: f64 },
    /// `R(a, b)` with `b > 0`.
    Rotation { a: f64, b: f64 },
}

impl CanonicalKind {
    pub fn matrix(&self) -> Mat2 {
        match *self {
            CanonicalKind::Diagonal { p, q } => Mat2::diag(p, q),
            CanonicalKind::Jordan { p } => Mat2::jordan(p),
            CanonicalKind::Rotation { a, b } => Mat2::rotation(a, b),
        }
    }
}

/// `B = transform^-1 * kind.matrix() * transform`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalForm {
    pub kind: CanonicalKind,
    pub transform: Mat2,
}

impl CanonicalForm {
    pub fn canonical(&self) -> Mat2 {
        self.kind.matrix()
    }

    /// `transform^-1 * canonical * transform`
    pub fn reconstruct(&self) -> Mat2 {
        let t = self.transform;
        t.adjugate() * self.canonical() * t * (1.0 / t.det())
    }

    /// Maps `Y` expressed in canonical coordinates back to the source basis.
    pub fn pull_back(&self, y: Mat2) -> Mat2 {
        let t = self.transform;
        t.adjugate() * y * t * (1.0 / t.det())
    }
}

pub fn det_trace(b: &Mat2) -> (f64, f64) {
    (b.det(), b.trace())
}

/// `C^-1 * B * C`
pub fn conjugate(b: &Mat2, c: &Mat2, tol: &Tolerances) -> Result<Mat2> {
    let inv = c.inverse(tol.eps_singular)?;
    Ok(inv * *b * *c)
}

/// Null vector of a 2x2 (real) matrix given by its rows, built from the row
/// with the larger norm. Ties go to the first row.
fn null_vector(r1: [f64; 2], r2: [f64; 2]) -> [f64; 2] {
    let n1 = r1[0] * r1[0] + r1[1] * r1[1];
    let n2 = r2[0] * r2[0] + r2[1] * r2[1];
    let r = if n1 >= n2 { r1 } else { r2 };
    let v = [-r[1], r[0]];
    // Unit length, dominant component positive.
    let len = v[0].hypot(v[1]);
    let sign = if v[0].abs() >= v[1].abs() { v[0].signum() } else { v[1].signum() };
    [sign * v[0] / len, sign * v[1] / len]
}

/// Real canonical form with an invertible witness transform.
pub fn canonical_form(b: &Mat2, tol: &Tolerances) -> CanonicalForm {
    match b.spectrum(tol) {
        Spectrum::Scalar(p) => CanonicalForm {
            kind: CanonicalKind::Diagonal { p, q: p },
            transform: Mat2::IDENTITY,
        },
        Spectrum::Split(p, q) => {
            // Columns of P = transform^-1 are eigenvectors for p and q.
            let vp = null_vector([b.e11 - p, b.e12], [b.e21, b.e22 - p]);
            let vq = null_vector([b.e11 - q, b.e12], [b.e21, b.e22 - q]);
            let p_mat = Mat2::new(vp[0], vq[0], vp[1], vq[1]);
            CanonicalForm {
                kind: CanonicalKind::Diagonal { p, q },
                transform: p_mat.adjugate() * (1.0 / p_mat.det()),
            }
        }
        Spectrum::Jordan(p) => {
            // P = [N w, w] with w the column direction N moves most.
            let n = *b - Mat2::scalar(p);
            let c1 = n.e11 * n.e11 + n.e21 * n.e21;
            let c2 = n.e12 * n.e12 + n.e22 * n.e22;
            let w = if c1 >= c2 { [1.0, 0.0] } else { [0.0, 1.0] };
            let v = [n.e11 * w[0] + n.e12 * w[1], n.e21 * w[0] + n.e22 * w[1]];
            let p_mat = Mat2::new(v[0], w[0], v[1], w[1]);
            CanonicalForm {
                kind: CanonicalKind::Jordan { p },
                transform: p_mat.adjugate() * (1.0 / p_mat.det()),
            }
        }
        Spectrum::Complex(a, beta) => {
            // z = u + i w is an eigenvector for a + i beta; P = [u, w].
            let n1 = (b.e11 - a).powi(2) + beta * beta + b.e12 * b.e12;
            let n2 = b.e21 * b.e21 + (b.e22 - a).powi(2) + beta * beta;
            let (u, w) = if n1 >= n2 {
                ([-b.e12, b.e11 - a], [0.0, -beta])
            } else {
                ([a - b.e22, b.e21], [beta, 0.0])
            };
            let p_mat = Mat2::new(u[0], w[0], u[1], w[1]);
            CanonicalForm {
                kind: CanonicalKind::Rotation { a, b: beta },
                transform: p_mat.adjugate() * (1.0 / p_mat.det()),
            }
        }
    }
}

/// `F(B) = B^n + a_{n-1} B^{n-1} + ... + a_0 I` by Horner recursion.
pub fn eval_poly_at_matrix(f: &RealPoly, b: &Mat2) -> Mat2 {
    let coeffs = f.coeffs();
    let mut acc = Mat2::scalar(coeffs[coeffs.len() - 1]);
    for &a in coeffs[..coeffs.len() - 1].iter().rev() {
        acc = acc * *b + Mat2::scalar(a);
    }
    acc
}
