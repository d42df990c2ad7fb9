//! Real univariate polynomials: ring arithmetic, Horner evaluation with
//! derivative, and root profiling with multiplicities.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::Tolerances;

const MAX_ITERATIONS: usize = 500;
const CONVERGED_RESIDUAL: f64 = 1e-13;
const ACCEPTED_RESIDUAL: f64 = 1e-8;

/// Polynomial with arbitrary leading coefficient, ascending coefficient order.
///
/// Intermediate values of expression expansion live here; [`RealPoly`] is
/// the normalized monic form. Each coefficient carries the sum of absolute
/// values of the terms that produced it, so cancellation can be told apart
/// from a coefficient that is merely small.
#[derive(Debug, Clone)]
pub struct Poly {
    coeffs: Vec<f64>,
    mags: Vec<f64>,
}

impl PartialEq for Poly {
    fn eq(&self, o: &Self) -> bool {
        self.coeffs == o.coeffs
    }
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut coeffs = coeffs;
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self::exact(coeffs)
    }

    fn exact(coeffs: Vec<f64>) -> Self {
        let mags = coeffs.iter().map(|c| c.abs()).collect();
        Self { coeffs, mags }
    }

    pub fn constant(c: f64) -> Self {
        Self::exact(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::exact(vec![0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree after dropping vanishing leading terms; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.trimmed().coeffs.iter().rposition(|&c| c != 0.0)
    }

    /// Drops leading coefficients that are zero up to the rounding left by
    /// cancellation among the terms that produced them.
    pub fn trimmed(&self) -> Poly {
        let mut t = self.clone();
        while t.coeffs.len() > 1 {
            let (c, m) = (t.coeffs[t.coeffs.len() - 1], t.mags[t.mags.len() - 1]);
            if c.abs() > 16.0 * f64::EPSILON * m {
                break;
            }
            t.coeffs.pop();
            t.mags.pop();
        }
        t
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::constant(1.0);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Divides by the leading coefficient; fails if nothing of degree >= 1 remains.
    pub fn into_monic(self) -> Result<RealPoly> {
        let t = self.trimmed();
        let lead = *t.coeffs.last().unwrap();
        if t.coeffs.len() < 2 || lead == 0.0 {
            return Err(Error::DegenerateResult);
        }
        let mut coeffs: Vec<f64> = t.coeffs.iter().map(|c| c / lead).collect();
        *coeffs.last_mut().unwrap() = 1.0;
        Ok(RealPoly { coeffs })
    }
}

impl From<RealPoly> for Poly {
    fn from(p: RealPoly) -> Self {
        Poly::exact(p.coeffs)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        let coeffs = (0..n).map(|i| at(&self.coeffs, i) + at(&o.coeffs, i)).collect();
        let mags = (0..n).map(|i| at(&self.mags, i) + at(&o.mags, i)).collect();
        Poly { coeffs, mags }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect(), mags: self.mags.clone() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let n = self.coeffs.len() + o.coeffs.len() - 1;
        let (mut coeffs, mut mags) = (vec![0.0; n], vec![0.0; n]);
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
                mags[i + j] += self.mags[i] * o.mags[j];
            }
        }
        Poly { coeffs, mags }
    }
}

impl Mul<f64> for &Poly {
    type Output = Poly;
    fn mul(self, k: f64) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            mags: self.mags.iter().map(|m| m * k.abs()).collect(),
        }
    }
}

/// Monic real polynomial of degree >= 1, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RealPoly {
    coeffs: Vec<f64>,
}

impl RealPoly {
    /// Validates an ascending coefficient list whose last entry is exactly 1.
    pub fn new(coeffs: &[f64]) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::DegenerateResult);
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coefficient in {coeffs:?}")));
        }
        if *coeffs.last().unwrap() != 1.0 {
            return Err(Error::InvalidInput(format!("polynomial is not monic: {coeffs:?}")));
        }
        Ok(Self { coeffs: coeffs.to_vec() })
    }

    /// `∏ (x - r)`
    pub fn from_real_roots(roots: &[f64]) -> Result<Self> {
        let mut acc = Poly::constant(1.0);
        for &r in roots {
            acc = &acc * &Poly::new(vec![-r, 1.0]);
        }
        acc.into_monic()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, other: &RealPoly) -> RealPoly {
        let p = &Poly::from(self.clone()) * &Poly::from(other.clone());
        RealPoly { coeffs: p.coeffs }
    }

    pub fn pow(&self, n: u32) -> Result<RealPoly> {
        Poly::from(self.clone()).pow(n).into_monic()
    }

    /// `f - k`, i.e. the polynomial whose matrix equation `= O` is `F(X) = k I`.
    pub fn shift_constant(&self, k: f64) -> RealPoly {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] -= k;
        RealPoly { coeffs }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_and_derive(x).0
    }

    /// Simultaneous value and first derivative by Horner's scheme.
    pub fn eval_and_derive<T>(&self, z: T) -> (T, T)
    where
        T: Copy + Add<Output = T> + Mul<Output = T> + From<f64>,
    {
        let n = self.coeffs.len();
        let mut value = T::from(self.coeffs[n - 1]);
        let mut deriv = T::from(0.0);
        for &a in self.coeffs[..n - 1].iter().rev() {
            deriv = deriv * z + value;
            value = value * z + T::from(a);
        }
        (value, deriv)
    }

    /// `Σ |a_k| r^k`, the magnitude against which evaluation noise is measured.
    pub fn abs_eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.abs())
    }

    /// Taylor coefficients `f^(k)(c) / k!` for `k = 0..=n`.
    fn taylor(&self, c: Complex64) -> Vec<Complex64> {
        let mut t: Vec<Complex64> = self.coeffs.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        let n = t.len();
        for k in 0..n {
            for j in (k..n - 1).rev() {
                let carry = t[j + 1] * c;
                t[j] += carry;
            }
        }
        t
    }

    /// Bounds on the magnitude of each Taylor coefficient's terms at `|c|`.
    fn taylor_scale(&self, r: f64) -> Vec<f64> {
        let mut t: Vec<f64> = self.coeffs.iter().map(|a| a.abs()).collect();
        let n = t.len();
        for k in 0..n {
            for j in (k..n - 1).rev() {
                t[j] += t[j + 1] * r;
            }
        }
        t
    }

    fn derivative_coeffs(&self, order: usize) -> Vec<f64> {
        let mut d = self.coeffs.clone();
        for _ in 0..order {
            d = d.iter().enumerate().skip(1).map(|(k, &a)| k as f64 * a).collect();
        }
        d
    }
}

impl fmt::Display for RealPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &a) in self.coeffs.iter().enumerate().rev() {
            if a == 0.0 {
                continue;
            }
            let sign = if a < 0.0 { "-" } else { "+" };
            if first {
                if a < 0.0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let m = a.abs();
            match (k, m == 1.0) {
                (0, _) => write!(f, "{m}")?,
                (1, true) => f.write_str("x")?,
                (1, false) => write!(f, "{m}*x")?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{m}*x^{k}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

/// The conjugate pair `a ± ib`, `b > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ComplexPair {
    pub a: f64,
    pub b: f64,
    pub multiplicity: usize,
}

/// All roots of a real polynomial grouped by multiplicity.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RootProfile {
    /// Strictly increasing in `value`.
    pub real_roots: Vec<RealRoot>,
    /// Sorted by `(a, b)`.
    pub complex_pairs: Vec<ComplexPair>,
}

impl RootProfile {
    pub fn degree(&self) -> usize {
        self.real_roots.iter().map(|r| r.multiplicity).sum::<usize>()
            + 2 * self.complex_pairs.iter().map(|c| c.multiplicity).sum::<usize>()
    }
}

fn initial_guesses(f: &RealPoly) -> Vec<Complex64> {
    let n = f.degree();
    let cauchy = 1.0 + f.coeffs[..n].iter().fold(0.0f64, |m, a| m.max(a.abs()));
    (0..n)
        .map(|k| {
            let angle = core::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            let radius = cauchy * (1.0 - 0.05 * k as f64 / n as f64);
            Complex64::from_polar(radius, angle)
        })
        .collect()
}

fn noise_scale(f: &RealPoly, z: Complex64) -> f64 {
    f.abs_eval(1f64.max(z.norm()))
}

/// Simultaneous Aberth–Ehrlich iteration for all roots.
fn aberth(f: &RealPoly) -> Vec<Complex64> {
    let n = f.degree();
    if n == 1 {
        return vec![Complex64::new(-f.coeffs[0], 0.0)];
    }
    let mut z = initial_guesses(f);
    for _ in 0..MAX_ITERATIONS {
        let mut done = true;
        for k in 0..n {
            let (p, dp) = f.eval_and_derive(z[k]);
            if p.norm() <= CONVERGED_RESIDUAL * noise_scale(f, z[k]) {
                continue;
            }
            done = false;
            if dp == Complex64::new(0.0, 0.0) {
                let nudge = Complex64::new(1e-8, 1e-8) * 1f64.max(z[k].norm());
                z[k] += nudge;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k && z[j] != z[k])
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
            }
        }
        if done {
            break;
        }
    }
    z
}

/// Single-linkage components of `pool` with the given relative radius.
fn components(roots: &[Complex64], pool: &[usize], rho: f64) -> Vec<Vec<usize>> {
    let mut label: Vec<usize> = (0..pool.len()).collect();
    fn find(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            let (a, b) = (roots[pool[i]], roots[pool[j]]);
            let scale = 1f64.max(a.norm()).max(b.norm());
            if (a - b).norm() <= rho * scale {
                let (ri, rj) = (find(&mut label, i), find(&mut label, j));
                label[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut heads: Vec<usize> = Vec::new();
    for i in 0..pool.len() {
        let h = find(&mut label, i);
        match heads.iter().position(|&x| x == h) {
            Some(g) => groups[g].push(pool[i]),
            None => {
                heads.push(h);
                groups.push(vec![pool[i]]);
            }
        }
    }
    groups
}

/// Newton on `f^(m-1)`, which has a simple root at an m-fold root of `f`.
fn refine_center(f: &RealPoly, m: usize, start: Complex64) -> Complex64 {
    let d = f.derivative_coeffs(m - 1);
    let lead = *d.last().unwrap();
    let monic: Vec<f64> = d.iter().map(|c| c / lead).collect();
    let g = RealPoly { coeffs: monic };
    if g.degree() == 0 {
        return start;
    }
    let mut c = start;
    for _ in 0..30 {
        let (v, dv) = g.eval_and_derive(c);
        if dv == Complex64::new(0.0, 0.0) {
            break;
        }
        let step = v / dv;
        if !step.is_finite() {
            break;
        }
        c -= step;
        if step.norm() <= 4.0 * f64::EPSILON * 1f64.max(c.norm()) {
            break;
        }
    }
    c
}

/// Accepts `members` as one root of multiplicity `members.len()` when the
/// first `m` Taylor coefficients at the refined centroid vanish to rounding.
fn validate_cluster(f: &RealPoly, roots: &[Complex64], members: &[usize], rho: f64) -> Option<Complex64> {
    let m = members.len();
    let mean = members.iter().map(|&i| roots[i]).sum::<Complex64>() / m as f64;
    let c = refine_center(f, m, mean);
    if (c - mean).norm() > rho * 1f64.max(mean.norm()) {
        return None;
    }
    let t = f.taylor(c);
    let s = f.taylor_scale(1f64.max(c.norm()));
    let delta = 1e3 * f.degree() as f64 * f64::EPSILON;
    (0..m).all(|k| t[k].norm() <= delta * s[k]).then_some(c)
}

fn polish(f: &RealPoly, z: Complex64) -> Complex64 {
    let mut best = z;
    let mut best_res = f.eval_and_derive(z).0.norm();
    let mut cur = z;
    for _ in 0..8 {
        let (v, dv) = f.eval_and_derive(cur);
        let step = v / dv;
        if !step.is_finite() {
            break;
        }
        cur -= step;
        let res = f.eval_and_derive(cur).0.norm();
        if res < best_res {
            best = cur;
            best_res = res;
        }
    }
    best
}

fn ladder(tol: &Tolerances) -> Vec<f64> {
    let mut rungs: Vec<f64> = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6]
        .into_iter()
        .filter(|&r| r > tol.cluster_radius)
        .collect();
    rungs.push(tol.cluster_radius);
    rungs
}

fn positive_zero(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// Locates every root, groups them by multiplicity and pairs complex roots.
pub fn find_root_profile(f: &RealPoly, tol: &Tolerances) -> Result<RootProfile> {
    let roots = aberth(f);
    for z in &roots {
        let res = f.eval_and_derive(*z).0.norm();
        if !z.is_finite() || res > ACCEPTED_RESIDUAL * noise_scale(f, *z) {
            return Err(Error::RootFindingFailed(format!(
                "root estimate {z} of {f} has residual {res:e}"
            )));
        }
    }

    // Coarse-to-fine: an m-fold root spreads to roughly eps^(1/m), so wide
    // groups are tried first and must pass the Taylor test; the finest rung
    // merges unconditionally.
    let mut pool: Vec<usize> = (0..roots.len()).collect();
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    let rungs = ladder(tol);
    for (i, &rho) in rungs.iter().enumerate() {
        let last = i + 1 == rungs.len();
        for group in components(&roots, &pool, rho) {
            if group.len() < 2 {
                continue;
            }
            let center = match validate_cluster(f, &roots, &group, rho) {
                Some(c) => c,
                None if last => group.iter().map(|&i| roots[i]).sum::<Complex64>() / group.len() as f64,
                None => continue,
            };
            clusters.push((center, group.len()));
            pool.retain(|i| !group.contains(i));
        }
    }
    clusters.extend(pool.iter().map(|&i| (polish(f, roots[i]), 1)));

    let mut profile = RootProfile::default();
    let mut upper: Vec<(Complex64, usize)> = Vec::new();
    let mut lower: Vec<(Complex64, usize)> = Vec::new();
    for (c, m) in clusters {
        if c.im.abs() <= tol.cluster_radius * 1f64.max(c.norm()) {
            profile.real_roots.push(RealRoot { value: positive_zero(c.re), multiplicity: m });
        } else if c.im > 0.0 {
            upper.push((c, m));
        } else {
            lower.push((c, m));
        }
    }
    for (c, m) in upper {
        let partner = lower
            .iter()
            .enumerate()
            .filter(|(_, (_, lm))| *lm == m)
            .min_by(|(_, (x, _)), (_, (y, _))| {
                (x.conj() - c).norm().total_cmp(&(y.conj() - c).norm())
            })
            .map(|(i, _)| i);
        let Some(i) = partner else {
            return Err(Error::RootFindingFailed(format!(
                "complex root {c} of multiplicity {m} has no conjugate partner"
            )));
        };
        let (d, _) = lower.swap_remove(i);
        if (d.conj() - c).norm() > 1e-6 * 1f64.max(c.norm()) {
            return Err(Error::RootFindingFailed(format!("roots {c} and {d} are not conjugate")));
        }
        profile.complex_pairs.push(ComplexPair {
            a: positive_zero(0.5 * (c.re + d.re)),
            b: 0.5 * (c.im - d.im),
            multiplicity: m,
        });
    }
    if let Some((d, _)) = lower.first() {
        return Err(Error::RootFindingFailed(format!("complex root {d} has no conjugate partner")));
    }

    profile.real_roots.sort_by(|x, y| x.value.total_cmp(&y.value));
    // Clusters closer than the radius were merged above, but separate
    // clusters may still land within it after refinement.
    let mut merged: Vec<RealRoot> = Vec::new();
    for r in profile.real_roots {
        match merged.last_mut() {
            Some(prev) if tol.same_param(prev.value, r.value) => {
                let total = prev.multiplicity + r.multiplicity;
                prev.value = (prev.value * prev.multiplicity as f64 + r.value * r.multiplicity as f64)
                    / total as f64;
                prev.multiplicity = total;
            }
            _ => merged.push(r),
        }
    }
    profile.real_roots = merged;
    profile
        .complex_pairs
        .sort_by(|x, y| x.a.total_cmp(&y.a).then(x.b.total_cmp(&y.b)));
    debug_assert_eq!(profile.degree(), f.degree());
    Ok(profile)
}

/// `f = g * h` with `g` carrying the real roots and `h` the complex pairs.
/// `None` stands for the constant factor 1.
pub fn split_real_complex(
    f: &RealPoly,
    profile: &RootProfile,
    tol: &Tolerances,
) -> Result<(Option<RealPoly>, Option<RealPoly>)> {
    let mut g = Poly::constant(1.0);
    for r in &profile.real_roots {
        g = &g * &Poly::new(vec![-r.value, 1.0]).pow(r.multiplicity as u32);
    }
    let mut h = Poly::constant(1.0);
    for c in &profile.complex_pairs {
        let quad = Poly::new(vec![c.a * c.a + c.b * c.b, -2.0 * c.a, 1.0]);
        h = &h * &quad.pow(c.multiplicity as u32);
    }
    let product = &g * &h;
    let scale = f.coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let err = (0..f.coeffs.len().max(product.coeffs.len())).fold(0.0f64, |m, i| {
        let a = f.coeffs.get(i).copied().unwrap_or(0.0);
        let b = product.coeffs.get(i).copied().unwrap_or(0.0);
        m.max((a - b).abs())
    });
    if err > tol.eps_residual * scale {
        return Err(Error::RootFindingFailed(format!(
            "factor product differs from {f} by {err:e}"
        )));
    }
    let factor = |p: Poly| if p.coeffs.len() > 1 { p.into_monic().ok() } else { None };
    Ok((factor(g), factor(h)))
}
