use matorbit_core::affine::{
    predict_sqrt_count, product_no_solution_check, solve_iterated_square, solve_shifted_quadratic, sqrt_solutions,
};
use matorbit_core::mat2::{conjugate, eval_poly_at_matrix};
use matorbit_core::oracle::{crosscheck, newton_multistart, Analytic};
use matorbit_core::{AffineSolveOutcome, EquationSpec, Mat2, Poly, RealPoly, SqrtCount, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn grid(rng: &mut ChaCha8Rng, lo: i32, hi: i32) -> f64 {
    rng.random_range(lo..=hi) as f64 / 2.0
}

/// A well-conditioned invertible matrix.
fn transform(rng: &mut ChaCha8Rng) -> Mat2 {
    loop {
        let t = Mat2::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        if t.det().abs() >= 0.5 {
            return t;
        }
    }
}

/// A non-scalar matrix: a random conjugate of a diagonal, Jordan or
/// rotation seed with eigenvalues on a half-integer grid.
fn seeded(rng: &mut ChaCha8Rng) -> Mat2 {
    let seed = match rng.random_range(0..3) {
        0 => {
            let p = grid(rng, -4, 6);
            let q = p + grid(rng, 1, 6);
            Mat2::diag(p, q)
        }
        1 => Mat2::jordan(grid(rng, -4, 6)),
        _ => Mat2::rotation(grid(rng, -4, 4), grid(rng, 1, 4)),
    };
    conjugate(&seed, &transform(rng), &tol()).unwrap()
}

/// Singular and non-zero: rank one, either idempotent-like or nilpotent.
fn singular(rng: &mut ChaCha8Rng) -> Mat2 {
    let seed = if rng.random_bool(0.5) {
        let l = grid(rng, -6, 6);
        Mat2::diag(if l == 0.0 { 1.0 } else { l }, 0.0)
    } else {
        Mat2::new(0.0, grid(rng, 1, 4), 0.0, 0.0)
    };
    conjugate(&seed, &transform(rng), &tol()).unwrap()
}

fn check_finite(out: &AffineSolveOutcome, f: &RealPoly, a: &Mat2, t: &Tolerances) {
    let xs = out.solutions();
    for (i, x) in xs.iter().enumerate() {
        let r = (eval_poly_at_matrix(f, x) - *a).norm();
        let deg = f.degree() as i32;
        assert!(r <= 1e-9 * (1.0 + x.norm().powi(deg)), "{x}: residual {r}");
        for y in &xs[i + 1..] {
            assert!(x.distance(y) > 10.0 * t.cluster_radius, "{x} ~ {y}");
        }
    }
}

#[test]
fn finite_solutions_have_small_residuals() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let t = tol();
    for _ in 0..1_000 {
        let c = seeded(&mut rng);
        check_finite(&sqrt_solutions(&c, &t), &RealPoly::new(&[0.0, 0.0, 1.0]).unwrap(), &c, &t);

        let (a1, a0) = (grid(&mut rng, -4, 4), grid(&mut rng, -4, 4));
        let a = seeded(&mut rng);
        let q = RealPoly::new(&[a0, a1, 1.0]).unwrap();
        check_finite(&solve_shifted_quadratic(a1, a0, &a, &t), &q, &a, &t);

        match solve_iterated_square(a1, a0, &a, &t) {
            Ok(out) => check_finite(&out, &q.mul(&q), &a, &t),
            Err(e) => panic!("{a}: {e}"),
        }
    }
}

#[test]
fn sqrt_counts_match_the_prediction() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let t = tol();
    for _ in 0..10_000 {
        let c = seeded(&mut rng);
        let predicted = predict_sqrt_count(&c, &t);
        assert_ne!(predicted, SqrtCount::Continuum);
        assert_eq!(sqrt_solutions(&c, &t).count(), predicted.finite(), "{c}");
    }
}

#[test]
fn singular_right_hand_sides_give_zero_two_or_four() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let t = tol();
    let mut checked = 0;
    for i in 0..10_000 {
        let a = singular(&mut rng);
        let a0 = rng.random_range(-4.0..4.0);
        let out = solve_shifted_quadratic(0.0, a0, &a, &t);
        let n = out.count().expect("singular non-zero A is never scalar");
        assert!([0, 2, 4].contains(&n), "{a}, a0 = {a0}: {n}");
        if a0 > 0.0 {
            assert_eq!(n, 0, "{a}, a0 = {a0}");
        }
        let c = a - Mat2::scalar(a0);
        assert_eq!(Some(n), predict_sqrt_count(&c, &t).finite());
        check_finite(&out, &RealPoly::new(&[a0, 0.0, 1.0]).unwrap(), &a, &t);

        if i % 100 == 0 {
            let f = RealPoly::new(&[a0, 0.0, 1.0]).unwrap();
            let spec = EquationSpec::new(f, a).unwrap();
            let check = crosscheck(&spec, Analytic::Affine(&out), 400, i as u64, &t).unwrap();
            assert!(check.consistent, "{spec}: {}", check.detail);
            checked += 1;
        }
    }
    assert_eq!(checked, 100);
}

#[test]
fn sqrt_solutions_are_conjugation_covariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let t = tol();
    for _ in 0..2_000 {
        let c = seeded(&mut rng);
        let m = transform(&mut rng);
        let moved = sqrt_solutions(&conjugate(&c, &m, &t).unwrap(), &t);
        let base = sqrt_solutions(&c, &t);
        assert_eq!(moved.count(), base.count());
        for x in base.solutions() {
            let y = conjugate(x, &m, &t).unwrap();
            let scale = 1.0 + y.norm();
            assert!(
                moved.solutions().iter().any(|z| z.distance(&y) <= 1e-7 * scale),
                "{c} under {m}: {y} missing"
            );
        }
    }
}

#[test]
fn certified_products_defeat_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let t = tol();
    for i in 0..100 {
        let k = rng.random_range(1..=3);
        let mut factors = Vec::new();
        let mut prod = Poly::constant(1.0);
        for _ in 0..k {
            let a1 = grid(&mut rng, -3, 3);
            // 4 a0 - a1^2 >= 1
            let a0 = (a1 * a1 + rng.random_range(1.0..8.0)) / 4.0;
            factors.push((a1, a0));
            prod = &prod * &Poly::new(vec![a0, a1, 1.0]);
        }
        let a = singular(&mut rng);
        let cert = product_no_solution_check(&factors, &a, &t).unwrap();
        assert!(cert.applies, "{}", cert.reason);

        let spec = EquationSpec::new(prod.into_monic().unwrap(), a).unwrap();
        let report = newton_multistart(&spec, 1000, i, &t);
        assert_eq!(report.count, 0, "{spec}: {:?}", report.found);
        assert!(report.best_residual > 1e-6, "{spec}: {}", report.best_residual);
    }
}

#[test]
fn certificate_refuses_real_rooted_factors_and_bad_hypotheses() {
    let t = tol();
    let n = Mat2::new(0.0, 1.0, 0.0, 0.0);
    assert!(!product_no_solution_check(&[(0.0, 1.0), (0.0, -1.0)], &n, &t).unwrap().applies);
    assert!(!product_no_solution_check(&[(2.0, 1.0)], &n, &t).unwrap().applies);
    assert!(product_no_solution_check(&[(0.0, 1.0)], &Mat2::ZERO, &t).is_err());
    assert!(product_no_solution_check(&[(0.0, 1.0)], &Mat2::diag(1.0, 2.0), &t).is_err());
}
