//! Similarity orbits of solutions: descriptors, membership classification,
//! the explicit `(b, c)` charts of the quadratic families, seeded samplers
//! and tangent-rank checks.

#[allow(unused_imports)] // std supplies these as inherent methods when linked
use num_traits::Float;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mat2::{eval_poly_at_matrix, Mat2, Spectrum};
use crate::rpoly::{find_root_profile, RealPoly, RootProfile};
use crate::tol::Tolerances;

/// One similarity orbit in the solution set of a homogeneous equation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind")
)]
pub enum OrbitDescriptor {
    /// The single point `p I`.
    Scalar { p: f64 },
    /// Conjugates of `J(p)`.
    Jordan { p: f64 },
    /// Conjugates of `D(p, q)`, `p < q`.
    Split { p: f64, q: f64 },
    /// Conjugates of `R(a, b)`, `b > 0`.
    Rotation { a: f64, b: f64 },
}

impl OrbitDescriptor {
    fn rank(&self) -> u8 {
        match self {
            OrbitDescriptor::Scalar { .. } => 0,
            OrbitDescriptor::Jordan { .. } => 1,
            OrbitDescriptor::Split { .. } => 2,
            OrbitDescriptor::Rotation { .. } => 3,
        }
    }

    fn params(&self) -> (f64, f64) {
        match *self {
            OrbitDescriptor::Scalar { p } | OrbitDescriptor::Jordan { p } => (p, 0.0),
            OrbitDescriptor::Split { p, q } => (p, q),
            OrbitDescriptor::Rotation { a, b } => (a, b),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            OrbitDescriptor::Scalar { .. } => "Scalar",
            OrbitDescriptor::Jordan { .. } => "Jordan",
            OrbitDescriptor::Split { .. } => "Split",
            OrbitDescriptor::Rotation { .. } => "Rotation",
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, OrbitDescriptor::Scalar { .. })
    }

    /// Deterministic total order: kind, then parameters.
    pub fn total_cmp(&self, other: &Self) -> core::cmp::Ordering {
        let (a0, a1) = self.params();
        let (b0, b1) = other.params();
        self.rank()
            .cmp(&other.rank())
            .then(a0.total_cmp(&b0))
            .then(a1.total_cmp(&b1))
    }

    /// Same kind and parameters within the cluster radius.
    pub fn approx_eq(&self, other: &Self, tol: &Tolerances) -> bool {
        let (a0, a1) = self.params();
        let (b0, b1) = other.params();
        self.rank() == other.rank() && tol.same_param(a0, b0) && tol.same_param(a1, b1)
    }

    /// `p I`, `J(p)`, `D(p, q)` or `R(a, b)`.
    pub fn representative(&self) -> Mat2 {
        match *self {
            OrbitDescriptor::Scalar { p } => Mat2::scalar(p),
            OrbitDescriptor::Jordan { p } => Mat2::jordan(p),
            OrbitDescriptor::Split { p, q } => Mat2::diag(p, q),
            OrbitDescriptor::Rotation { a, b } => Mat2::rotation(a, b),
        }
    }

    /// Moves every eigenvalue by `h`.
    pub fn shifted(&self, h: f64) -> Self {
        match *self {
            OrbitDescriptor::Scalar { p } => OrbitDescriptor::Scalar { p: p + h },
            OrbitDescriptor::Jordan { p } => OrbitDescriptor::Jordan { p: p + h },
            OrbitDescriptor::Split { p, q } => OrbitDescriptor::Split { p: p + h, q: q + h },
            OrbitDescriptor::Rotation { a, b } => OrbitDescriptor::Rotation { a: a + h, b },
        }
    }

    /// The orbit a matrix belongs to, read off its eigen-structure.
    pub fn of_matrix(m: &Mat2, tol: &Tolerances) -> Self {
        match m.spectrum(tol) {
            Spectrum::Scalar(p) => OrbitDescriptor::Scalar { p },
            Spectrum::Jordan(p) => OrbitDescriptor::Jordan { p },
            Spectrum::Split(p, q) => OrbitDescriptor::Split { p, q },
            Spectrum::Complex(a, b) => OrbitDescriptor::Rotation { a, b },
        }
    }

    /// Parses the `Kind(x)` / `Kind(x,y)` form produced by `Display`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse orbit descriptor {text:?}"));
        let text = text.trim();
        let open = text.find('(').ok_or_else(bad)?;
        let inner = text[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let nums = inner
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<f64>>>()?;
        let d = match (text[..open].trim(), nums.as_slice()) {
            ("Scalar", [p]) => OrbitDescriptor::Scalar { p: *p },
            ("Jordan", [p]) => OrbitDescriptor::Jordan { p: *p },
            ("Split", [p, q]) if p < q => OrbitDescriptor::Split { p: *p, q: *q },
            ("Rotation", [a, b]) if *b > 0.0 => OrbitDescriptor::Rotation { a: *a, b: *b },
            _ => return Err(bad()),
        };
        Ok(d)
    }
}

impl fmt::Display for OrbitDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            OrbitDescriptor::Scalar { p } => write!(f, "Scalar({p})"),
            OrbitDescriptor::Jordan { p } => write!(f, "Jordan({p})"),
            OrbitDescriptor::Split { p, q } => write!(f, "Split({p},{q})"),
            OrbitDescriptor::Rotation { a, b } => write!(f, "Rotation({a},{b})"),
        }
    }
}

/// Orbits making up the solution set of `F(X) = O` for a polynomial with
/// the given root profile, in the canonical order.
pub fn decompose(profile: &RootProfile) -> Vec<OrbitDescriptor> {
    let reals = &profile.real_roots;
    let mut out = Vec::new();
    out.extend(reals.iter().map(|r| OrbitDescriptor::Scalar { p: r.value }));
    out.extend(
        reals
            .iter()
            .filter(|r| r.multiplicity >= 2)
            .map(|r| OrbitDescriptor::Jordan { p: r.value }),
    );
    for (i, r) in reals.iter().enumerate() {
        for s in &reals[i + 1..] {
            out.push(OrbitDescriptor::Split { p: r.value, q: s.value });
        }
    }
    out.extend(
        profile
            .complex_pairs
            .iter()
            .map(|c| OrbitDescriptor::Rotation { a: c.a, b: c.b }),
    );
    out.sort_by(|x, y| x.total_cmp(y));
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classification {
    Orbit(OrbitDescriptor),
    NotASolution { residual: f64 },
}

/// `|| sum |a_k| |B|^k ||` with `|B|` taken entrywise; tracks the rounding
/// error of evaluating `F(B)`.
pub(crate) fn abs_scale(f: &RealPoly, b: &Mat2) -> f64 {
    let abs = Mat2::new(b.e11.abs(), b.e12.abs(), b.e21.abs(), b.e22.abs());
    let c = f.coeffs();
    let mut acc = Mat2::scalar(1.0);
    for a in c[..c.len() - 1].iter().rev() {
        acc = acc * abs + Mat2::scalar(a.abs());
    }
    acc.norm()
}

/// Residual bound for `F(B) = O`, relative to the size of the terms of `F(B)`.
pub(crate) fn residual_bound(f: &RealPoly, b: &Mat2, tol: &Tolerances) -> f64 {
    tol.eps_residual * 1f64.max(abs_scale(f, b))
}

/// Orbit membership test against a fixed polynomial.
///
/// Holds the decomposition so repeated classification does not re-run the
/// root finder.
#[derive(Debug, Clone)]
pub struct Classifier {
    f: RealPoly,
    orbits: Vec<OrbitDescriptor>,
    tol: Tolerances,
}

impl Classifier {
    pub fn new(f: &RealPoly, tol: &Tolerances) -> Result<Self> {
        let profile = find_root_profile(f, tol)?;
        Ok(Self::with_orbits(f, decompose(&profile), tol))
    }

    pub fn with_orbits(f: &RealPoly, orbits: Vec<OrbitDescriptor>, tol: &Tolerances) -> Self {
        Self { f: f.clone(), orbits, tol: *tol }
    }

    pub fn orbits(&self) -> &[OrbitDescriptor] {
        &self.orbits
    }

    pub fn classify(&self, b: &Mat2) -> Result<Classification> {
        let residual = eval_poly_at_matrix(&self.f, b).norm();
        if !(residual <= residual_bound(&self.f, b, &self.tol)) {
            return Ok(Classification::NotASolution { residual });
        }
        let raw = OrbitDescriptor::of_matrix(b, &self.tol);
        self.orbits
            .iter()
            .find(|d| d.approx_eq(&raw, &self.tol))
            .or_else(|| self.nearest(b))
            .map(|d| Classification::Orbit(*d))
            .ok_or_else(|| {
                Error::InconsistentClassification(format!("{b} looks like {raw}, residual {residual:e}"))
            })
    }

    /// Near a root of multiplicity `m` a residual of `r` only pins the
    /// eigenvalues to within about `r^(1/m)`, so a point that passed the
    /// residual test may read as a neighbouring kind (a tiny rotation near
    /// a nilpotent, say). Snap each eigenvalue to the closest one carried by
    /// the known orbits and look the result up.
    fn nearest(&self, b: &Mat2) -> Option<&OrbitDescriptor> {
        let mut roots: Vec<(f64, f64)> = Vec::new();
        for d in &self.orbits {
            match *d {
                OrbitDescriptor::Scalar { p } | OrbitDescriptor::Jordan { p } => roots.push((p, 0.0)),
                OrbitDescriptor::Split { p, q } => roots.extend([(p, 0.0), (q, 0.0)]),
                OrbitDescriptor::Rotation { a, b } => roots.push((a, b)),
            }
        }
        let snap = |re: f64, im: f64| {
            roots.iter().copied().min_by(|x, y| {
                let dx = (x.0 - re).hypot(x.1 - im.abs());
                let dy = (y.0 - re).hypot(y.1 - im.abs());
                dx.total_cmp(&dy)
            })
        };
        let (z1, z2) = match b.spectrum(&self.tol) {
            Spectrum::Scalar(p) | Spectrum::Jordan(p) => ((p, 0.0), (p, 0.0)),
            Spectrum::Split(p, q) => ((p, 0.0), (q, 0.0)),
            Spectrum::Complex(a, im) => ((a, im), (a, -im)),
        };
        let (r1, r2) = (snap(z1.0, z1.1)?, snap(z2.0, z2.1)?);
        let guess = if r1.1 > 0.0 || r2.1 > 0.0 {
            if r1 != r2 {
                return None;
            }
            OrbitDescriptor::Rotation { a: r1.0, b: r1.1 }
        } else if r1.0 != r2.0 {
            OrbitDescriptor::Split { p: r1.0.min(r2.0), q: r1.0.max(r2.0) }
        } else {
            let p = r1.0;
            if b.distance(&Mat2::scalar(p)) <= 10.0 * self.tol.cluster_radius * (1.0 + p.abs()) {
                OrbitDescriptor::Scalar { p }
            } else {
                OrbitDescriptor::Jordan { p }
            }
        };
        self.orbits.iter().find(|d| **d == guess)
    }
}

pub fn classify_solution(b: &Mat2, f: &RealPoly, tol: &Tolerances) -> Result<Classification> {
    Classifier::new(f, tol)?.classify(b)
}

/// Sign of `alpha` in `Y^2 + alpha I = O`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum ChartCase {
    /// `alpha < 0`
    A,
    /// `alpha = 0`
    B,
    /// `alpha > 0`
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum ChartBranch {
    Plus,
    Minus,
    /// `(sqrt(-alpha) - a1/2) I`, case A only.
    ScalarPlus,
    /// `(-sqrt(-alpha) - a1/2) I`, case A only.
    ScalarMinus,
}

/// One explicit family of solutions of `X^2 + a1 X + a0 I = O`, written with
/// `alpha = a0 - a1^2 / 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Chart {
    pub a1: f64,
    pub alpha: f64,
    pub case: ChartCase,
    pub branch: ChartBranch,
}

impl Chart {
    pub fn new(a1: f64, alpha: f64, branch: ChartBranch, tol: &Tolerances) -> Result<Self> {
        let scale = 1f64.max(0.25 * a1 * a1).max(alpha.abs());
        let case = if alpha.abs() <= tol.eps_disc * scale {
            ChartCase::B
        } else if alpha < 0.0 {
            ChartCase::A
        } else {
            ChartCase::C
        };
        Self::with_case(a1, alpha, case, branch)
    }

    fn with_case(a1: f64, alpha: f64, case: ChartCase, branch: ChartBranch) -> Result<Self> {
        let scalar = matches!(branch, ChartBranch::ScalarPlus | ChartBranch::ScalarMinus);
        if scalar && case != ChartCase::A {
            return Err(Error::InvalidInput(format!(
                "scalar branches exist only when alpha < 0 (alpha = {alpha})"
            )));
        }
        let alpha = if case == ChartCase::B { 0.0 } else { alpha };
        Ok(Self { a1, alpha, case, branch })
    }

    /// The chart whose family is the orbit `d`. The case follows the
    /// descriptor kind even when `alpha` is within `eps_disc` of zero.
    pub fn for_descriptor(d: &OrbitDescriptor, branch: ChartBranch) -> Result<Self> {
        match *d {
            OrbitDescriptor::Scalar { .. } => Err(Error::ScalarOrbit),
            OrbitDescriptor::Split { p, q } => {
                let h = 0.5 * (q - p);
                Self::with_case(-(p + q), -h * h, ChartCase::A, branch)
            }
            OrbitDescriptor::Jordan { p } => Self::with_case(-2.0 * p, 0.0, ChartCase::B, branch),
            OrbitDescriptor::Rotation { a, b } => Self::with_case(-2.0 * a, b * b, ChartCase::C, branch),
        }
    }

    /// `a0 = alpha + a1^2 / 4`
    pub fn a0(&self) -> f64 {
        self.alpha + 0.25 * self.a1 * self.a1
    }

    /// The quadratic `x^2 + a1 x + a0` the chart solves.
    pub fn polynomial(&self) -> RealPoly {
        RealPoly::new(&[self.a0(), self.a1, 1.0]).expect("finite monic quadratic")
    }

    /// `bc` must not exceed this.
    pub fn domain_bound(&self) -> f64 {
        -self.alpha
    }

    pub fn contains(&self, b: f64, c: f64, tol: &Tolerances) -> bool {
        b * c <= self.domain_bound() + tol.eps_disc
    }

    /// `X^2 + a1 X + a0 I`
    pub fn residual(&self, x: &Mat2) -> Mat2 {
        *x * *x + *x * self.a1 + Mat2::scalar(self.a0())
    }
}

/// Evaluates a chart at `(b, c)`; scalar branches ignore the coordinates.
pub fn chart_map(chart: &Chart, b: f64, c: f64, tol: &Tolerances) -> Result<Mat2> {
    let h = 0.5 * chart.a1;
    let s = match chart.branch {
        ChartBranch::ScalarPlus => return Ok(Mat2::scalar((-chart.alpha).sqrt() - h)),
        ChartBranch::ScalarMinus => return Ok(Mat2::scalar(-(-chart.alpha).sqrt() - h)),
        ChartBranch::Plus => 1.0,
        ChartBranch::Minus => -1.0,
    };
    if !chart.contains(b, c, tol) {
        return Err(Error::OutsideDomain { b, c, bound: chart.domain_bound() });
    }
    let root = s * (chart.domain_bound() - b * c).max(0.0).sqrt();
    Ok(Mat2::new(root - h, b, c, -root - h))
}

/// `n` seeded samples from the orbit `d`, drawn uniformly over the chart
/// domain intersected with `[-bound, bound]^2`.
///
/// The box is widened to `2 sqrt(alpha)` for rotation orbits whose domain
/// would otherwise miss it.
pub fn sample_orbit(
    d: &OrbitDescriptor,
    n: usize,
    seed: u64,
    bound: f64,
    tol: &Tolerances,
) -> Result<Vec<Mat2>> {
    if n == 0 || !(bound > 0.0) {
        return Err(Error::InvalidInput(format!("need n >= 1 and box > 0, got n = {n}, box = {bound}")));
    }
    if let OrbitDescriptor::Scalar { p } = *d {
        return Ok(alloc::vec![Mat2::scalar(p); n]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plus = Chart::for_descriptor(d, ChartBranch::Plus)?;
    let minus = Chart::for_descriptor(d, ChartBranch::Minus)?;
    let bound = bound.max(2.0 * plus.alpha.max(0.0).sqrt());
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let b = rng.random_range(-bound..=bound);
        let c = rng.random_range(-bound..=bound);
        if b * c > plus.domain_bound() {
            continue;
        }
        let chart = if rng.random_bool(0.5) { &plus } else { &minus };
        let x = chart_map(chart, b, c, tol)?;
        // The Jordan chart passes through the scalar point at (0, 0).
        if x.is_scalar(tol) {
            continue;
        }
        out.push(x);
    }
    Ok(out)
}

/// `C(phi)^-1 D(p, q) C(phi)` in closed form.
pub fn rotation_conjugate(p: f64, q: f64, phi: f64) -> Mat2 {
    let (s, c) = phi.sin_cos();
    let off = 0.5 * (p - q) * (2.0 * phi).sin();
    Mat2::new(p * c * c + q * s * s, off, off, q * c * c + p * s * s)
}

/// Singular values `(s1 >= s2)` of the 2 x n matrix with rows `u`, `v`.
///
/// Uses `s1 s2 = |u ^ v|` so a small second singular value keeps its
/// relative accuracy.
pub fn pair_singular_values(u: &[f64], v: &[f64]) -> (f64, f64) {
    let sum: f64 = u.iter().chain(v).map(|x| x * x).sum();
    let mut wedge = 0.0;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            let m = u[i] * v[j] - u[j] * v[i];
            wedge += m * m;
        }
    }
    let prod = wedge.sqrt();
    let gap = ((sum - 2.0 * prod).max(0.0) * (sum + 2.0 * prod)).sqrt();
    let s1 = (0.5 * (sum + gap)).sqrt();
    if s1 == 0.0 {
        return (0.0, 0.0);
    }
    (s1, prod / s1)
}

fn rank_of(sv: (f64, f64), tol: &Tolerances) -> usize {
    let (s1, s2) = sv;
    if s1 == 0.0 {
        0
    } else if s2 > tol.eps_rank * s1 {
        2
    } else {
        1
    }
}

/// Rank of the gradients of `(trace X, det X)` at `b`. The orbit is a level
/// set of both, so rank 2 means the orbit is a smooth surface near `b`.
pub fn local_rank(b: &Mat2, d: &OrbitDescriptor, tol: &Tolerances) -> Result<usize> {
    if d.is_scalar() {
        return Err(Error::ScalarOrbit);
    }
    let grad_trace = [1.0, 0.0, 0.0, 1.0];
    let grad_det = [b.e22, -b.e21, -b.e12, b.e11];
    Ok(rank_of(pair_singular_values(&grad_trace, &grad_det), tol))
}

/// Central-difference Jacobian of `(b, c) -> chart_map(b, c)`, returned as
/// its two columns (derivatives along `b` and along `c`).
pub fn chart_jacobian(chart: &Chart, b: f64, c: f64, step: f64, tol: &Tolerances) -> Result<[[f64; 4]; 2]> {
    let diff = |db: f64, dc: f64| -> Result<[f64; 4]> {
        let hi = chart_map(chart, b + db, c + dc, tol)?.to_array();
        let lo = chart_map(chart, b - db, c - dc, tol)?.to_array();
        let mut col = [0.0; 4];
        for k in 0..4 {
            col[k] = (hi[k] - lo[k]) / (2.0 * step);
        }
        Ok(col)
    };
    Ok([diff(step, 0.0)?, diff(0.0, step)?])
}

/// Numerical rank of the chart Jacobian and its singular values.
pub fn chart_rank(chart: &Chart, b: f64, c: f64, tol: &Tolerances) -> Result<(usize, f64, f64)> {
    let [jb, jc] = chart_jacobian(chart, b, c, 1e-6, tol)?;
    let sv = pair_singular_values(&jb, &jc);
    Ok((rank_of(sv, tol), sv.0, sv.1))
}
