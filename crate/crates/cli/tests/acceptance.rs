//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::{Command, ExitCode};
use std::time::Instant;

use matorbit_core::affine::{predict_sqrt_count, product_no_solution_check, solve_shifted_quadratic, sqrt_solutions};
use matorbit_core::analyzer::{analyze, compare_orbit_sets};
use matorbit_core::mat2::{conjugate, eval_poly_at_matrix};
use matorbit_core::oracle::{crosscheck, newton_multistart, Analytic};
use matorbit_core::orbits::{chart_map, local_rank, sample_orbit, Classification, Classifier};
use matorbit_core::{
    AffineSolveOutcome, Chart, ChartBranch, ChartCase, EquationSpec, Mat2, OrbitDescriptor, Poly, RealPoly,
    Tolerances,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn cli(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_matorbit"))
        .args(args)
        .env_remove("MATORBIT_CONFIG")
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "{args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn poly(c: &[f64]) -> RealPoly {
    RealPoly::new(c).unwrap()
}

/// Solutions and residuals from a `solve` report, residuals recomputed here.
fn solved(eq: &str) -> Result<(Vec<Mat2>, f64), String> {
    let r = cli(&["solve", eq])?;
    let spec = matorbit_core::parse_equation(eq).map_err(|e| e.to_string())?;
    let xs: Vec<Mat2> = r["solutions"]
        .as_array()
        .ok_or("no solutions array")?
        .iter()
        .map(|m| {
            let v: Vec<f64> = m.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
            Mat2::new(v[0], v[1], v[2], v[3])
        })
        .collect();
    ensure!(r["count"].as_u64() == Some(xs.len() as u64), "{eq}: count field disagrees with solution list");
    let worst = xs.iter().map(|x| (eval_poly_at_matrix(&spec.f, x) - spec.rhs).norm()).fold(0.0, f64::max);
    Ok((xs, worst))
}

fn pairwise_distinct(xs: &[Mat2], t: &Tolerances) -> bool {
    xs.iter()
        .enumerate()
        .all(|(i, x)| xs[i + 1..].iter().all(|y| x.distance(y) > 10.0 * t.cluster_radius * (1.0 + x.norm())))
}

fn criterion_1() -> Outcome {
    let mut worst = 0f64;
    for (eq, want) in [("X^2 = [[0,1],[0,0]]", 0), ("X^2 = [[1,1],[0,0]]", 2), ("X^2 = [[1,0],[0,2]]", 4)] {
        let (xs, r) = solved(eq)?;
        ensure!(xs.len() == want, "{eq}: {} solutions, want {want}", xs.len());
        ensure!(r <= 1e-9, "{eq}: residual {r:e}");
        worst = worst.max(r);
    }
    Ok(format!("counts 0/2/4, worst residual {worst:.1e}"))
}

fn criterion_2() -> Outcome {
    let t = tol();
    let eq = "(X^2-I)^2 = [[1,0],[0,0]]";
    let (xs, r) = solved(eq)?;
    ensure!(xs.len() == 6, "{} solutions", xs.len());
    ensure!(r <= 1e-8, "residual {r:e}");
    ensure!(pairwise_distinct(&xs, &t), "solutions not distinct");
    let report = cli(&["oracle", eq, "--starts", "2000", "--seed", "1"])?;
    ensure!(report["crosscheck"]["consistent"] == true, "crosscheck: {}", report["crosscheck"]);
    Ok(format!("6 solutions, residual {r:.1e}, oracle found {}", report["count"]))
}

fn criterion_3() -> Outcome {
    let t = tol();
    let n = Mat2::new(0.0, 1.0, 0.0, 0.0);
    let cases = [(1.0, n, 0), (-1.0, n, 2), (-1.0, Mat2::new(1.0, 1.0, 0.0, 0.0), 4)];
    for (a0, a, want) in cases {
        let out = solve_shifted_quadratic(0.0, a0, &a, &t);
        ensure!(out.count() == Some(want), "X^2 + {a0} I = {a}: {:?}", out.count());
        let f = poly(&[a0, 0.0, 1.0]);
        for x in out.solutions() {
            let r = (eval_poly_at_matrix(&f, x) - a).norm();
            ensure!(r <= 1e-9, "{x}: residual {r:e}");
        }
    }
    ensure!(out_is_empty(&solve_shifted_quadratic(0.0, 1.0, &n, &t)), "(i) not Empty");
    // The intermediate step of the six-solution example.
    let ys = sqrt_solutions(&Mat2::diag(1.0, 0.0), &t);
    ensure!(ys.count() == Some(2), "Y^2 = diag(1,0): {:?}", ys.count());
    for y in [Mat2::diag(1.0, 0.0), Mat2::diag(-1.0, 0.0)] {
        ensure!(ys.solutions().iter().any(|z| z.distance(&y) <= 1e-15), "missing {y}");
    }
    Ok("Empty / 2 / 4".into())
}

fn out_is_empty(o: &AffineSolveOutcome) -> bool {
    matches!(o, AffineSolveOutcome::Empty)
}

fn orbits_of(f: &RealPoly) -> Result<Vec<OrbitDescriptor>, String> {
    Ok(analyze(f, &tol()).map_err(|e| e.to_string())?.orbits)
}

fn same_set(a: &[OrbitDescriptor], b: &[OrbitDescriptor]) -> bool {
    compare_orbit_sets(a, b, &tol()).equal && a.len() == b.len()
}

fn criterion_4() -> Outcome {
    use OrbitDescriptor::*;
    let x = poly(&[0.0, 1.0]);
    let x2 = orbits_of(&x.pow(2).unwrap())?;
    ensure!(same_set(&x2, &[Scalar { p: 0.0 }, Jordan { p: 0.0 }]), "x^2: {x2:?}");
    for n in 2..=6 {
        let on = orbits_of(&x.pow(n).unwrap())?;
        ensure!(same_set(&on, &x2), "x^{n}: {on:?}");
    }
    let q = poly(&[1.0, 0.0, 1.0]);
    for n in 1..=3 {
        let on = orbits_of(&q.pow(n).unwrap())?;
        ensure!(same_set(&on, &[Rotation { a: 0.0, b: 1.0 }]), "(x^2+1)^{n}: {on:?}");
    }
    let d = poly(&[-1.0, 0.0, 1.0]);
    let three = [Scalar { p: -1.0 }, Scalar { p: 1.0 }, Split { p: -1.0, q: 1.0 }];
    let od = orbits_of(&d)?;
    ensure!(same_set(&od, &three), "x^2-1: {od:?}");
    let od2 = orbits_of(&d.pow(2).unwrap())?;
    let cmp = compare_orbit_sets(&od2, &od, &tol());
    ensure!(
        cmp.only_in_second.is_empty() && same_set(&cmp.only_in_first, &[Jordan { p: -1.0 }, Jordan { p: 1.0 }]),
        "(x^2-1)^2: {od2:?}"
    );
    let mixed = orbits_of(&poly(&[0.0, 0.0, 1.0]).mul(&d))?;
    ensure!(mixed.len() == 7, "x^2(x^2-1): {} orbits", mixed.len());
    for want in [Split { p: -1.0, q: 0.0 }, Split { p: 0.0, q: 1.0 }] {
        ensure!(mixed.iter().any(|o| o.approx_eq(&want, &tol())), "x^2(x^2-1) lacks {want}");
    }
    Ok("all five identities hold".into())
}

fn transform(rng: &mut ChaCha8Rng) -> Mat2 {
    loop {
        let m = Mat2::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        if m.det().abs() >= 0.5 {
            return m;
        }
    }
}

/// Rank one: a conjugated `diag(l, 0)` or nilpotent `[[0, s], [0, 0]]`.
fn singular_nonzero(rng: &mut ChaCha8Rng) -> Mat2 {
    let seed = if rng.random_bool(0.5) {
        let l = rng.random_range(0.25..4.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        Mat2::diag(l, 0.0)
    } else {
        Mat2::new(0.0, rng.random_range(0.25..3.0), 0.0, 0.0)
    };
    conjugate(&seed, &transform(rng), &tol()).unwrap()
}

fn criterion_5() -> Outcome {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut tally = [0usize; 5];
    let mut checked = 0;
    for i in 0..10_000 {
        let a = singular_nonzero(&mut rng);
        let a0 = rng.random_range(-4.0..4.0);
        let out = solve_shifted_quadratic(0.0, a0, &a, &t);
        let n = out.count().ok_or_else(|| format!("{a}: family outcome"))?;
        ensure!(matches!(n, 0 | 2 | 4), "{a}, a0 = {a0}: {n} solutions");
        ensure!(a0 <= 0.0 || n == 0, "{a}, a0 = {a0} > 0: {n} solutions");
        let predicted = predict_sqrt_count(&(a - Mat2::scalar(a0)), &t).finite();
        ensure!(predicted == Some(n), "{a}, a0 = {a0}: {n} vs predicted {predicted:?}");
        tally[n] += 1;
        if i % 100 == 0 {
            let spec = EquationSpec::new(poly(&[a0, 0.0, 1.0]), a).unwrap();
            let c = crosscheck(&spec, Analytic::Affine(&out), 500, i, &t).map_err(|e| e.to_string())?;
            ensure!(c.consistent, "{spec}: {}", c.detail);
            checked += 1;
        }
    }
    Ok(format!("counts 0/2/4 = {}/{}/{}, {checked} oracle crosschecks", tally[0], tally[2], tally[4]))
}

fn criterion_6() -> Outcome {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut best = f64::INFINITY;
    for i in 0..100 {
        let mut factors = Vec::new();
        let mut prod = Poly::constant(1.0);
        for _ in 0..rng.random_range(1..=3) {
            let a1: f64 = rng.random_range(-3.0..3.0);
            let a0 = (a1 * a1 + rng.random_range(0.5..8.0)) / 4.0;
            factors.push((a1, a0));
            prod = &prod * &Poly::new(vec![a0, a1, 1.0]);
        }
        let a = singular_nonzero(&mut rng);
        let cert = product_no_solution_check(&factors, &a, &t).map_err(|e| e.to_string())?;
        ensure!(cert.applies, "{factors:?}: {}", cert.reason);
        let spec = EquationSpec::new(prod.into_monic().unwrap(), a).unwrap();
        let r = newton_multistart(&spec, 1000, i, &t);
        ensure!(r.count == 0, "{spec}: oracle found {:?}", r.found);
        best = best.min(r.best_residual);
    }
    ensure!(best > 1e-6, "an oracle start reached residual {best:e}");
    Ok(format!("100 certificates, oracle silent, best residual {best:.1e}"))
}

fn random_orbit(kind: usize, rng: &mut ChaCha8Rng) -> OrbitDescriptor {
    let p = rng.random_range(-3.0..3.0);
    match kind {
        0 => OrbitDescriptor::Jordan { p },
        1 => OrbitDescriptor::Split { p, q: p + rng.random_range(0.1..4.0) },
        _ => OrbitDescriptor::Rotation { a: p, b: rng.random_range(0.1..3.0) },
    }
}

/// Singular values of a 4x2 matrix from the eigenvalues of `J^T J`.
fn singular_values(j: &[[f64; 2]; 4]) -> (f64, f64) {
    let (mut a, mut b, mut d) = (0.0, 0.0, 0.0);
    for row in j {
        a += row[0] * row[0];
        b += row[0] * row[1];
        d += row[1] * row[1];
    }
    let mean = 0.5 * (a + d);
    let gap = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    ((mean + gap).sqrt(), (mean - gap).max(0.0).sqrt())
}

fn criterion_7() -> Outcome {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::INFINITY;
    for kind in 0..3 {
        for cfg in 0..20 {
            let d = random_orbit(kind, &mut rng);
            for x in sample_orbit(&d, 100, 100 * kind as u64 + cfg, 5.0, &t).map_err(|e| e.to_string())? {
                let rank = local_rank(&x, &d, &t).map_err(|e| e.to_string())?;
                ensure!(rank == 2, "{d} at {x}: local rank {rank}");
            }
            let chart = Chart::for_descriptor(&d, ChartBranch::Plus).map_err(|e| e.to_string())?;
            let mut n = 0;
            while n < 100 {
                let (b, c) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
                // Interior: stay off the branch locus bc = -alpha.
                if b * c > chart.domain_bound() - 1e-2 {
                    continue;
                }
                let h = 1e-6;
                let at = |b: f64, c: f64| chart_map(&chart, b, c, &t).map(|m| m.to_array());
                let (bp, bm) = (at(b + h, c), at(b - h, c));
                let (cp, cm) = (at(b, c + h), at(b, c - h));
                let (Ok(bp), Ok(bm), Ok(cp), Ok(cm)) = (bp, bm, cp, cm) else { continue };
                let mut j = [[0.0; 2]; 4];
                for i in 0..4 {
                    j[i] = [(bp[i] - bm[i]) / (2.0 * h), (cp[i] - cm[i]) / (2.0 * h)];
                }
                let (s1, s2) = singular_values(&j);
                ensure!(s2 >= 1e-6 * s1, "{d} at (b, c) = ({b}, {c}): singular values {s1:e}, {s2:e}");
                worst = worst.min(s2 / s1);
                n += 1;
            }
        }
    }
    Ok(format!("6000 local ranks = 2, smallest chart s2/s1 = {worst:.2e}"))
}

fn criterion_8() -> Outcome {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0f64;
    for i in 0..10_000 {
        let a1 = rng.random_range(-4.0..4.0);
        let (alpha, case) = match i % 3 {
            0 => (-rng.random_range(0.01..9.0), ChartCase::A),
            1 => (0.0, ChartCase::B),
            _ => (rng.random_range(0.01..9.0), ChartCase::C),
        };
        let branch = if rng.random_bool(0.5) { ChartBranch::Plus } else { ChartBranch::Minus };
        let chart = Chart::new(a1, alpha, branch, &t).map_err(|e| e.to_string())?;
        ensure!(chart.case == case, "a1 = {a1}, alpha = {alpha}: case {:?}", chart.case);
        let (b, c) = loop {
            let (b, c) = (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
            if b * c <= -alpha {
                break (b, c);
            }
        };
        let x = chart_map(&chart, b, c, &t).map_err(|e| e.to_string())?;
        // X^2 + a1 X + (alpha + a1^2/4) I, evaluated directly.
        let a0 = alpha + 0.25 * a1 * a1;
        let r = (x * x + x * a1 + Mat2::scalar(a0)).norm();
        let scaled = r / (1.0 + x.norm() * x.norm());
        ensure!(scaled <= 1e-9, "{x}: residual {r:e}");
        worst = worst.max(scaled);
    }
    for _ in 0..1_000 {
        let a1: f64 = rng.random_range(-4.0..4.0);
        let alpha: f64 = -rng.random_range(0.01..9.0);
        let roots = [-(-alpha).sqrt() - 0.5 * a1, (-alpha).sqrt() - 0.5 * a1];
        for (branch, p) in [(ChartBranch::ScalarMinus, roots[0]), (ChartBranch::ScalarPlus, roots[1])] {
            let chart = Chart::new(a1, alpha, branch, &t).map_err(|e| e.to_string())?;
            let x = chart_map(&chart, 0.0, 0.0, &t).map_err(|e| e.to_string())?;
            ensure!(x == Mat2::scalar(p), "{branch:?}: {x} != {p} I");
        }
    }
    Ok(format!("10^4 chart points, worst scaled residual {worst:.1e}; scalar points exact"))
}

fn criterion_9() -> Outcome {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..1_000 {
        let d = random_orbit(rng.random_range(0..3), &mut rng);
        let rep = d.representative();
        // f = (char poly of d) * (x - 7) so that f has other orbits too.
        let f = poly(&[rep.det(), -rep.trace(), 1.0]).mul(&poly(&[-7.0, 1.0]));
        let classifier = Classifier::new(&f, &t).map_err(|e| e.to_string())?;
        let b = sample_orbit(&d, 1, i, 3.0, &t).map_err(|e| e.to_string())?[0];
        let before = classifier.classify(&b).map_err(|e| e.to_string())?;
        let moved = conjugate(&b, &transform(&mut rng), &t).map_err(|e| e.to_string())?;
        let after = classifier.classify(&moved).map_err(|e| e.to_string())?;
        ensure!(
            matches!((before, after), (Classification::Orbit(x), Classification::Orbit(y)) if x == y && x.approx_eq(&d, &t)),
            "{d}: {b} -> {before:?}, {moved} -> {after:?}"
        );
    }
    Ok("10^3 conjugates keep their orbit".into())
}

fn criterion_10() -> Outcome {
    let t = tol();
    let mut report = Vec::new();
    for d in [
        OrbitDescriptor::Jordan { p: 0.5 },
        OrbitDescriptor::Split { p: -1.0, q: 1.0 },
        OrbitDescriptor::Rotation { a: 0.0, b: 1.0 },
    ] {
        let rep = d.representative();
        let f = poly(&[rep.det(), -rep.trace(), 1.0]);
        for m in [1e3, 1e6] {
            let xs = sample_orbit(&d, 200, 10, m, &t).map_err(|e| e.to_string())?;
            let big = xs.iter().map(|x| x.norm()).fold(0.0, f64::max);
            ensure!(big >= m, "{d}, box {m}: largest norm {big:e}");
            for x in &xs {
                let r = eval_poly_at_matrix(&f, x).norm();
                ensure!(r <= 1e-9 * (1.0 + x.norm() * x.norm()), "{x}: residual {r:e}");
            }
            report.push(format!("{big:.1e}"));
        }
    }
    Ok(format!("largest norms {}", report.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("square-root counts 0, 2, 4", criterion_1),
        ("iterated square has 6 solutions", criterion_2),
        ("shifted quadratic examples", criterion_3),
        ("solution-set identities", criterion_4),
        ("singular right-hand side sweep", criterion_5),
        ("no-solution certificate vs oracle", criterion_6),
        ("orbits and charts have rank 2", criterion_7),
        ("chart residuals", criterion_8),
        ("conjugation invariance", criterion_9),
        ("unbounded solution sets", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS ({name}; {detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL ({name}; {why}; {secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
