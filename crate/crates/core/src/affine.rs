//! Equations with a non-zero right-hand side: `X^2 = C`, shifted
//! quadratics, products of quadratics without real roots, and
//! `(X^2 + g1 X + g0 I)^2 = A`.

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat2::{canonical_form, CanonicalKind, Mat2, Spectrum};
use crate::orbits::OrbitDescriptor;
use crate::tol::Tolerances;

/// Number of real square roots of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqrtCount {
    Zero,
    Two,
    Four,
    Continuum,
}

impl SqrtCount {
    pub fn finite(self) -> Option<usize> {
        match self {
            SqrtCount::Zero => Some(0),
            SqrtCount::Two => Some(2),
            SqrtCount::Four => Some(4),
            SqrtCount::Continuum => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AffineSolveOutcome {
    Empty,
    Finite(Vec<Mat2>),
    /// The right-hand side was scalar; the solutions are these orbits.
    Family(Vec<OrbitDescriptor>),
}

impl AffineSolveOutcome {
    pub fn count(&self) -> Option<usize> {
        match self {
            AffineSolveOutcome::Empty => Some(0),
            AffineSolveOutcome::Finite(v) => Some(v.len()),
            AffineSolveOutcome::Family(_) => None,
        }
    }

    pub fn solutions(&self) -> &[Mat2] {
        match self {
            AffineSolveOutcome::Finite(v) => v,
            _ => &[],
        }
    }

    fn from_list(v: Vec<Mat2>) -> Self {
        if v.is_empty() {
            AffineSolveOutcome::Empty
        } else {
            AffineSolveOutcome::Finite(v)
        }
    }
}

fn zero_band(c: &Mat2, tol: &Tolerances) -> f64 {
    tol.eps_disc * 1f64.max(c.norm())
}

/// Real square roots of an eigenvalue: none, `{0}` or `{±sqrt}`.
fn eigen_roots(l: f64, band: f64) -> Vec<f64> {
    if l.abs() <= band {
        alloc::vec![0.0]
    } else if l < 0.0 {
        Vec::new()
    } else {
        let s = l.sqrt();
        alloc::vec![s, -s]
    }
}

pub fn predict_sqrt_count(c: &Mat2, tol: &Tolerances) -> SqrtCount {
    let band = zero_band(c, tol);
    match c.spectrum(tol) {
        Spectrum::Scalar(_) => SqrtCount::Continuum,
        Spectrum::Split(p, q) => match eigen_roots(p, band).len() * eigen_roots(q, band).len() {
            0 => SqrtCount::Zero,
            1 | 2 => SqrtCount::Two,
            _ => SqrtCount::Four,
        },
        Spectrum::Jordan(p) => {
            if p > band {
                SqrtCount::Two
            } else {
                SqrtCount::Zero
            }
        }
        Spectrum::Complex(..) => SqrtCount::Two,
    }
}

/// Whether `C` has non-real eigenvalues, a case the closed-form square
/// root handles beyond the classical real-eigenvalue analysis.
pub fn uses_complex_extension(c: &Mat2, tol: &Tolerances) -> bool {
    matches!(c.spectrum(tol), Spectrum::Complex(..))
}

/// Orbits of `X^2 = kappa I`.
fn scalar_sqrt_family(kappa: f64, band: f64) -> Vec<OrbitDescriptor> {
    if kappa.abs() <= band {
        alloc::vec![OrbitDescriptor::Scalar { p: 0.0 }, OrbitDescriptor::Jordan { p: 0.0 }]
    } else if kappa > 0.0 {
        let s = kappa.sqrt();
        alloc::vec![
            OrbitDescriptor::Scalar { p: -s },
            OrbitDescriptor::Scalar { p: s },
            OrbitDescriptor::Split { p: -s, q: s },
        ]
    } else {
        alloc::vec![OrbitDescriptor::Rotation { a: 0.0, b: (-kappa).sqrt() }]
    }
}

/// Principal square root of `a + ib`, `b > 0`, as `(x, y)` with `y > 0`.
fn complex_sqrt(a: f64, b: f64) -> (f64, f64) {
    let r = a.hypot(b);
    if a >= 0.0 {
        let x = (0.5 * (r + a)).sqrt();
        (x, b / (2.0 * x))
    } else {
        let y = (0.5 * (r - a)).sqrt();
        (b / (2.0 * y), y)
    }
}

fn push_distinct(out: &mut Vec<Mat2>, x: Mat2, tol: &Tolerances) {
    let near = |y: &Mat2| y.distance(&x) <= 10.0 * tol.cluster_radius * (1.0 + x.norm());
    if !out.iter().any(near) {
        out.push(x);
    }
}

/// All real `X` with `X^2 = C`.
pub fn sqrt_solutions(c: &Mat2, tol: &Tolerances) -> AffineSolveOutcome {
    let band = zero_band(c, tol);
    if c.is_scalar(tol) {
        return AffineSolveOutcome::Family(scalar_sqrt_family(0.5 * c.trace(), band));
    }
    let form = canonical_form(c, tol);
    let mut roots = Vec::new();
    match form.kind {
        CanonicalKind::Diagonal { p, q } => {
            for &x in &eigen_roots(p, band) {
                for &y in &eigen_roots(q, band) {
                    roots.push(Mat2::diag(x, y));
                }
            }
        }
        CanonicalKind::Jordan { p } => {
            if p > band {
                let s = p.sqrt();
                for s in [s, -s] {
                    roots.push(Mat2::new(s, 1.0 / (2.0 * s), 0.0, s));
                }
            }
        }
        CanonicalKind::Rotation { a, b } => {
            let (x, y) = complex_sqrt(a, b);
            roots.push(Mat2::rotation(x, y));
            roots.push(Mat2::rotation(-x, -y));
        }
    }
    let mut out = Vec::with_capacity(roots.len());
    for y in roots {
        push_distinct(&mut out, form.pull_back(y), tol);
    }
    AffineSolveOutcome::from_list(out)
}

/// Solves `X^2 + a1 X + a0 I = A` by completing the square.
pub fn solve_shifted_quadratic(a1: f64, a0: f64, a: &Mat2, tol: &Tolerances) -> AffineSolveOutcome {
    let h = 0.5 * a1;
    let c = *a + Mat2::scalar(h * h - a0);
    match sqrt_solutions(&c, tol) {
        AffineSolveOutcome::Empty => AffineSolveOutcome::Empty,
        AffineSolveOutcome::Finite(ys) => {
            let mut out = Vec::with_capacity(ys.len());
            for y in ys {
                push_distinct(&mut out, y - Mat2::scalar(h), tol);
            }
            AffineSolveOutcome::Finite(out)
        }
        AffineSolveOutcome::Family(ds) => AffineSolveOutcome::Family(ds.iter().map(|d| d.shifted(-h)).collect()),
    }
}

/// Outcome of the no-solution test for a product of quadratics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Certificate {
    /// True when `prod (X^2 + a1 X + a0 I) = A` provably has no solution.
    pub applies: bool,
    pub reason: String,
}

/// For singular non-zero `A`: if no factor `x^2 + a1 x + a0` has a real
/// root, no product of them evaluated at a real matrix can equal `A`.
pub fn product_no_solution_check(factors: &[(f64, f64)], a: &Mat2, tol: &Tolerances) -> Result<Certificate> {
    let size = a.norm();
    if size == 0.0 {
        return Err(Error::HypothesisViolated(String::from("right-hand side is the zero matrix")));
    }
    if a.det().abs() > tol.eps_residual * size * size {
        return Err(Error::HypothesisViolated(format!("right-hand side is invertible (det = {:e})", a.det())));
    }
    if factors.is_empty() {
        return Err(Error::InvalidInput(String::from("no factors given")));
    }
    for (i, &(a1, a0)) in factors.iter().enumerate() {
        let disc = 4.0 * a0 - a1 * a1;
        let scale = 1f64.max(a1 * a1).max((4.0 * a0).abs());
        if !(disc > tol.eps_disc * scale) {
            return Ok(Certificate {
                applies: false,
                reason: format!("factor {i} (a1 = {a1}, a0 = {a0}) has real roots: 4 a0 - a1^2 = {disc}"),
            });
        }
    }
    Ok(Certificate {
        applies: true,
        reason: format!(
            "all {} factors satisfy 4 a0 - a1^2 > 0 and A is singular and non-zero, so no real solution exists",
            factors.len()
        ),
    })
}

/// Solves `(X^2 + g1 X + g0 I)^2 = A` through `Y^2 = A` followed by
/// `X^2 + g1 X + g0 I = Y` for each root `Y`.
pub fn solve_iterated_square(g1: f64, g0: f64, a: &Mat2, tol: &Tolerances) -> Result<AffineSolveOutcome> {
    let ys = match sqrt_solutions(a, tol) {
        AffineSolveOutcome::Empty => return Ok(AffineSolveOutcome::Empty),
        AffineSolveOutcome::Family(_) => return Err(Error::ScalarCascade),
        AffineSolveOutcome::Finite(ys) => ys,
    };
    let mut out = Vec::new();
    for y in ys {
        match solve_shifted_quadratic(g1, g0, &y, tol) {
            AffineSolveOutcome::Empty => {}
            AffineSolveOutcome::Family(_) => return Err(Error::ScalarCascade),
            AffineSolveOutcome::Finite(xs) => {
                for x in xs {
                    push_distinct(&mut out, x, tol);
                }
            }
        }
    }
    Ok(AffineSolveOutcome::from_list(out))
}
