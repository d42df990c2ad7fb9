//! Structure of the solution set of `X^n + a_{n-1} X^{n-1} + ... + a_0 I = A`
//! over real 2x2 matrices.
//!
//! The homogeneous case (`A = O`) is decomposed exactly into similarity
//! orbits driven by the root profile of the scalar polynomial
//! `x^n + a_{n-1} x^{n-1} + ... + a_0`. Quadratic and iterated-square left
//! sides with a non-scalar right-hand side are solved in closed form. Every
//! result can be cross-checked against an independent multistart Newton
//! search in [`oracle`].
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod affine;
pub mod analyzer;
pub mod eqparse;
mod error;
pub mod mat2;
pub mod oracle;
pub mod orbits;
pub mod rpoly;
mod tol;

pub use affine::{AffineSolveOutcome, SqrtCount};
pub use analyzer::{AnalysisReport, Cardinality, ComparisonReport};
pub use eqparse::{parse_equation, EquationSpec};
pub use error::{Error, Result};
pub use mat2::{CanonicalForm, CanonicalKind, Mat2};
pub use oracle::OracleReport;
pub use orbits::{Chart, ChartBranch, ChartCase, OrbitDescriptor};
pub use rpoly::{Poly, RealPoly, RootProfile};
pub use tol::Tolerances;
