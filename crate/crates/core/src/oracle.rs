//! Brute-force check of analytic results: multistart Newton on the four
//! real equations `F(X) - A = O`, with a finite-difference Jacobian so that
//! nothing here depends on the closed-form solvers.

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::affine::AffineSolveOutcome;
use crate::analyzer::AnalysisReport;
use crate::eqparse::EquationSpec;
use crate::error::Result;
use crate::mat2::{eval_poly_at_matrix, Mat2, Spectrum};
use crate::orbits::{abs_scale, Classification, Classifier};
use crate::tol::Tolerances;

const MAX_STEPS: usize = 100;
const DIVERGENCE_NORM: f64 = 1e6;
const FD_STEP: f64 = 1e-7;
/// Search ball radius, in units of `1 + ||A|| + cauchy(f)`.
const SEARCH_FACTOR: f64 = 6.0;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    /// Distinct converged points, in order of first discovery.
    pub found: Vec<Mat2>,
    pub count: usize,
    /// Largest residual among `found`; the best attempt's residual when
    /// nothing converged.
    pub max_residual: f64,
    /// Smallest final residual over all starts that did not diverge.
    pub best_residual: f64,
    pub starts_used: usize,
}

/// `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let lo = s.lo + self.lo + o.lo;
        let hi = s.hi + lo;
        Dd { hi, lo: lo - (hi - s.hi) }
    }

    fn mul(self, b: f64) -> Dd {
        let p = self.hi * b;
        let lo = self.hi.mul_add(b, -p) + self.lo * b;
        let hi = p + lo;
        Dd { hi, lo: lo - (hi - p) }
    }

    fn of(a: f64) -> Dd {
        Dd { hi: a, lo: 0.0 }
    }
}

/// `F(X) - A` by Horner in double-double arithmetic, so that the
/// cancellation between large powers at large `||X||` does not swamp the
/// result.
fn residual_dd(spec: &EquationSpec, x: &Mat2) -> f64 {
    let xm = [[x.e11, x.e12], [x.e21, x.e22]];
    let mut acc = [[Dd::ZERO; 2]; 2];
    for &a in spec.f.coeffs().iter().rev() {
        let mut next = [[Dd::ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                next[i][j] = acc[i][0].mul(xm[0][j]).add(acc[i][1].mul(xm[1][j]));
            }
            next[i][i] = next[i][i].add(Dd::of(a));
        }
        acc = next;
    }
    let rhs = spec.rhs.to_array();
    let mut sum = 0.0;
    for (k, v) in acc.iter().flatten().enumerate() {
        let d = v.add(Dd::of(-rhs[k]));
        let e = d.hi + d.lo;
        sum += e * e;
    }
    sum.sqrt()
}

/// Residual of `F(X) = A` and the bound it is accepted under: absolute,
/// plus the rounding floor of the double-double evaluation.
fn residual(spec: &EquationSpec, x: &Mat2, tol: &Tolerances) -> (f64, f64) {
    let r = residual_dd(spec, x);
    let floor = 64.0 * f64::EPSILON * f64::EPSILON * (abs_scale(&spec.f, x) + spec.rhs.norm());
    (r, tol.eps_residual * (1.0 + spec.rhs.norm()) + floor)
}

fn cauchy_bound(spec: &EquationSpec) -> f64 {
    let c = spec.f.coeffs();
    1.0 + c[..c.len() - 1].iter().fold(0.0f64, |m, a| m.max(a.abs()))
}

/// Iterates leaving this ball count as diverged.
///
/// Some right-hand sides (nilpotent ones, for instance) admit near-solutions
/// whose residual decays like `||X||^-4`; bounding the search keeps those
/// from being reported as roots.
pub fn search_radius(spec: &EquationSpec) -> f64 {
    (SEARCH_FACTOR * (1.0 + spec.rhs.norm() + cauchy_bound(spec))).min(DIVERGENCE_NORM)
}

fn eval(spec: &EquationSpec, x: &[f64; 4]) -> [f64; 4] {
    (eval_poly_at_matrix(&spec.f, &Mat2::new(x[0], x[1], x[2], x[3])) - spec.rhs).to_array()
}

/// Radius of the start box: twice `1 + rho(A) + cauchy(f)`.
pub fn start_radius(spec: &EquationSpec, tol: &Tolerances) -> f64 {
    let rho = match spec.rhs.spectrum(tol) {
        Spectrum::Scalar(p) | Spectrum::Jordan(p) => p.abs(),
        Spectrum::Split(p, q) => p.abs().max(q.abs()),
        Spectrum::Complex(a, b) => a.hypot(b),
    };
    2.0 * (1.0 + rho + cauchy_bound(spec))
}

/// Solves `(J^T J + mu I) d = -J^T r` by Cholesky; `j[i][k]` is
/// `d r_i / d x_k`.
fn damped_step(j: &[[f64; 4]; 4], r: &[f64; 4]) -> Option<[f64; 4]> {
    let mut m = [[0.0; 4]; 4];
    let mut g = [0.0; 4];
    for a in 0..4 {
        for b in 0..4 {
            m[a][b] = (0..4).map(|i| j[i][a] * j[i][b]).sum();
        }
        g[a] = -(0..4).map(|i| j[i][a] * r[i]).sum::<f64>();
    }
    let trace: f64 = (0..4).map(|a| m[a][a]).sum();
    if !(trace > 0.0) {
        return None;
    }
    let mu = 1e-13 * trace;
    for (a, row) in m.iter_mut().enumerate() {
        row[a] += mu;
    }
    let mut l = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..=a {
            let s = m[a][b] - (0..b).map(|k| l[a][k] * l[b][k]).sum::<f64>();
            if a == b {
                if !(s > 0.0) {
                    return None;
                }
                l[a][a] = s.sqrt();
            } else {
                l[a][b] = s / l[b][b];
            }
        }
    }
    let mut y = [0.0; 4];
    for a in 0..4 {
        y[a] = (g[a] - (0..a).map(|k| l[a][k] * y[k]).sum::<f64>()) / l[a][a];
    }
    let mut d = [0.0; 4];
    for a in (0..4).rev() {
        d[a] = (y[a] - (a + 1..4).map(|k| l[k][a] * d[k]).sum::<f64>()) / l[a][a];
    }
    d.iter().all(|v| v.is_finite()).then_some(d)
}

enum Attempt {
    Converged(Mat2, f64),
    Stalled(f64),
    Diverged,
}

fn run_start(spec: &EquationSpec, mut x: [f64; 4], limit: f64, tol: &Tolerances) -> Attempt {
    let norm = |v: &[f64; 4]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut last_step = f64::INFINITY;
    for _ in 0..MAX_STEPS {
        let r = eval(spec, &x);
        if !r.iter().all(|v| v.is_finite()) || norm(&x) > limit {
            return Attempt::Diverged;
        }
        if last_step <= 1e-14 * (1.0 + norm(&x)) {
            break;
        }
        let mut j = [[0.0; 4]; 4];
        for k in 0..4 {
            let h = FD_STEP * 1f64.max(x[k].abs());
            let (mut hi, mut lo) = (x, x);
            hi[k] += h;
            lo[k] -= h;
            let (fh, fl) = (eval(spec, &hi), eval(spec, &lo));
            for i in 0..4 {
                j[i][k] = (fh[i] - fl[i]) / (2.0 * h);
            }
        }
        let Some(d) = damped_step(&j, &r) else {
            break;
        };
        for k in 0..4 {
            x[k] += d[k];
        }
        last_step = norm(&d);
    }
    let m = Mat2::new(x[0], x[1], x[2], x[3]);
    if !m.is_finite() || m.norm() > limit {
        return Attempt::Diverged;
    }
    let (res, bound) = residual(spec, &m, tol);
    // A point still moving is drifting along a valley, not sitting on a root.
    if res <= bound && last_step <= 1e-6 * (1.0 + m.norm()) {
        Attempt::Converged(m, res)
    } else {
        Attempt::Stalled(res)
    }
}

/// Newton from `n_starts` seeded uniform starts; deterministic in `seed`.
pub fn newton_multistart(spec: &EquationSpec, n_starts: usize, seed: u64, tol: &Tolerances) -> OracleReport {
    let radius = start_radius(spec, tol);
    let limit = search_radius(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<Mat2> = Vec::new();
    let mut max_residual = 0.0f64;
    let mut best_residual = f64::INFINITY;
    for _ in 0..n_starts {
        let start: [f64; 4] = core::array::from_fn(|_| rng.random_range(-radius..=radius));
        match run_start(spec, start, limit, tol) {
            Attempt::Converged(x, res) => {
                best_residual = best_residual.min(res);
                let near = |y: &Mat2| y.distance(&x) <= 10.0 * tol.cluster_radius * (1.0 + x.norm());
                if !found.iter().any(near) {
                    found.push(x);
                    max_residual = max_residual.max(res);
                }
            }
            Attempt::Stalled(res) => best_residual = best_residual.min(res),
            Attempt::Diverged => {}
        }
    }
    if found.is_empty() {
        max_residual = best_residual;
    }
    OracleReport { count: found.len(), found, max_residual, best_residual, starts_used: n_starts }
}

/// The analytic result being checked.
#[derive(Debug, Clone, Copy)]
pub enum Analytic<'a> {
    Affine(&'a AffineSolveOutcome),
    Homogeneous(&'a AnalysisReport),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    pub consistent: bool,
    pub detail: String,
    pub oracle: OracleReport,
}

pub fn crosscheck(
    spec: &EquationSpec,
    analytic: Analytic<'_>,
    n_starts: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<CrossCheck> {
    let oracle = newton_multistart(spec, n_starts, seed, tol);
    let (consistent, detail) = match analytic {
        Analytic::Affine(AffineSolveOutcome::Empty) => (
            oracle.count == 0,
            format!("analytic: no solution; oracle: {} found in {} starts", oracle.count, n_starts),
        ),
        Analytic::Affine(AffineSolveOutcome::Finite(xs)) => {
            let stray = oracle
                .found
                .iter()
                .filter(|x| !xs.iter().any(|y| y.distance(x) <= 10.0 * tol.cluster_radius * (1.0 + x.norm())))
                .count();
            (
                oracle.count == xs.len() && stray == 0,
                format!(
                    "analytic: {} solutions; oracle: {} found, {} not among the analytic ones",
                    xs.len(),
                    oracle.count,
                    stray
                ),
            )
        }
        Analytic::Affine(AffineSolveOutcome::Family(orbits)) => {
            // A family only arises for a scalar right-hand side kappa I,
            // i.e. the homogeneous equation f(X) - kappa I = O.
            let f = spec.f.shift_constant(0.5 * spec.rhs.trace());
            orbit_check(&Classifier::with_orbits(&f, orbits.clone(), tol), &oracle)?
        }
        Analytic::Homogeneous(report) => {
            orbit_check(&Classifier::with_orbits(&report.f, report.orbits.clone(), tol), &oracle)?
        }
    };
    Ok(CrossCheck { consistent, detail, oracle })
}

fn orbit_check(classifier: &Classifier, oracle: &OracleReport) -> Result<(bool, String)> {
    let mut misses = 0;
    for x in &oracle.found {
        match classifier.classify(x) {
            Ok(Classification::Orbit(_)) => {}
            Ok(Classification::NotASolution { .. }) | Err(_) => misses += 1,
        }
    }
    Ok((
        misses == 0,
        format!(
            "{} oracle solutions, {} outside the {} analytic orbits",
            oracle.count,
            misses,
            classifier.orbits().len()
        ),
    ))
}
