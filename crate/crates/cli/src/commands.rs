use serde_json::{json, Map, Value};

use matorbit_core::affine::{
    product_no_solution_check, solve_iterated_square, solve_shifted_quadratic, sqrt_solutions, uses_complex_extension,
};
use matorbit_core::analyzer::{analyze, compare_orbit_sets};
use matorbit_core::mat2::eval_poly_at_matrix;
use matorbit_core::oracle::{crosscheck, newton_multistart, Analytic};
use matorbit_core::orbits::{sample_orbit, Classification, Classifier};
use matorbit_core::rpoly::find_root_profile;
use matorbit_core::{
    parse_equation, AffineSolveOutcome, AnalysisReport, EquationSpec, Error, Mat2, OrbitDescriptor, RealPoly,
    Tolerances,
};

use crate::config::CliConfig;
use crate::CliError;

pub fn parse(text: &str) -> Result<EquationSpec, CliError> {
    parse_equation(text).map_err(CliError::parse)
}

/// Accepts a bare polynomial as shorthand for `<poly> = O`.
fn parse_homogeneous(text: &str) -> Result<EquationSpec, CliError> {
    let spec = if text.contains('=') { parse(text)? } else { parse(&format!("{text} = O"))? };
    if !spec.is_homogeneous() {
        return Err(CliError::input(format!("{spec}: expected a homogeneous equation `<poly> = O`")));
    }
    Ok(spec)
}

pub fn parse_matrix(text: &str) -> Result<Mat2, CliError> {
    let rows: [[f64; 2]; 2] = serde_json::from_str(text)
        .map_err(|e| CliError::input(format!("matrix {text:?} is not of the form [[a,b],[c,d]]: {e}")))?;
    let m = Mat2::from_rows(rows);
    Ok(m)
}

fn residual(spec: &EquationSpec, x: &Mat2) -> f64 {
    (eval_poly_at_matrix(&spec.f, x) - spec.rhs).norm()
}

/// Row-major 4-arrays, with `-0.0` printed as `0.0`.
fn matrices(xs: &[Mat2]) -> Value {
    Value::Array(xs.iter().map(|x| json!(x.to_array().map(|v| v + 0.0))).collect())
}

fn orbit_list(ds: &[OrbitDescriptor]) -> Value {
    serde_json::to_value(ds).expect("descriptors serialize")
}

/// Keys every report carries.
fn base(command: &str, cfg: &CliConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("tolerances".into(), serde_json::to_value(cfg.tolerances).expect("tolerances serialize"));
    m.insert("seed".into(), json!(cfg.seed));
    m
}

fn analysis_fields(m: &mut Map<String, Value>, report: &AnalysisReport) {
    m.insert("polynomial".into(), json!(report.f.to_string()));
    m.insert("coefficients".into(), json!(report.f.coeffs()));
    m.insert("orbits".into(), orbit_list(&report.orbits));
    m.insert("orbit_count".into(), json!(report.orbits.len()));
    m.insert("cardinality".into(), serde_json::to_value(report.cardinality).expect("cardinality serializes"));
    m.insert("dimension".into(), json!(report.dimension_claim));
    m.insert("root_profile".into(), serde_json::to_value(&report.profile).expect("profile serializes"));
    m.insert("g_factor".into(), json!(report.g_factor.as_ref().map(|g| g.coeffs())));
    m.insert("h_factor".into(), json!(report.h_factor.as_ref().map(|h| h.coeffs())));
}

pub fn analyze_cmd(text: &str, cfg: &CliConfig) -> Result<Value, CliError> {
    let spec = parse_homogeneous(text)?;
    let report = analyze(&spec.f, &cfg.tolerances).map_err(CliError::solver)?;
    let mut m = base("analyze", cfg);
    m.insert("equation".into(), json!(spec.to_string()));
    analysis_fields(&mut m, &report);
    m.insert("notes".into(), json!(report.notes));
    Ok(Value::Object(m))
}

/// Analytic answer for `F(X) = A`, by the shape of the equation.
pub enum Routed {
    /// `A = kappa I`: the solutions are those of `f - kappa = O`.
    Homogeneous { kappa: f64, report: AnalysisReport },
    Affine { route: &'static str, outcome: AffineSolveOutcome, notes: Vec<String> },
}

/// `(g1, g0)` with `f = (x^2 + g1 x + g0)^2`, if `f` has that shape.
fn square_of_quadratic(f: &RealPoly) -> Option<(f64, f64)> {
    let c = f.coeffs();
    if c.len() != 5 {
        return None;
    }
    let g1 = 0.5 * c[3];
    let g0 = 0.5 * (c[2] - g1 * g1);
    let scale = c.iter().fold(1f64, |s, a| s.max(a.abs()));
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * scale;
    (close(c[1], 2.0 * g1 * g0) && close(c[0], g0 * g0)).then_some((g1, g0))
}

pub fn route(spec: &EquationSpec, tol: &Tolerances) -> Result<Routed, CliError> {
    let a = spec.rhs;
    let c = spec.f.coeffs();
    if a.is_scalar(tol) {
        let kappa = 0.5 * a.trace();
        let report = analyze(&spec.f.shift_constant(-kappa), tol).map_err(CliError::solver)?;
        return Ok(Routed::Homogeneous { kappa, report });
    }
    let mut notes = Vec::new();
    let (route, outcome) = match spec.f.degree() {
        1 => ("linear", AffineSolveOutcome::Finite(vec![a - Mat2::scalar(c[0])])),
        2 => {
            let shifted = a + Mat2::scalar(0.25 * c[1] * c[1] - c[0]);
            if uses_complex_extension(&shifted, tol) {
                notes.push(
                    "the shifted right-hand side has non-real eigenvalues; its two roots come from the \
                     half-angle square root, beyond the real-eigenvalue case analysis"
                        .to_string(),
                );
            }
            if c[0] == 0.0 && c[1] == 0.0 {
                ("sqrt", sqrt_solutions(&a, tol))
            } else {
                ("shifted_quadratic", solve_shifted_quadratic(c[1], c[0], &a, tol))
            }
        }
        _ => {
            if let Some((g1, g0)) = square_of_quadratic(&spec.f) {
                ("iterated_square", solve_iterated_square(g1, g0, &a, tol).map_err(CliError::solver)?)
            } else {
                let profile = find_root_profile(&spec.f, tol).map_err(CliError::solver)?;
                if !profile.real_roots.is_empty() {
                    return Err(unsupported(spec));
                }
                let factors: Vec<(f64, f64)> = profile
                    .complex_pairs
                    .iter()
                    .flat_map(|p| std::iter::repeat_n((-2.0 * p.a, p.a * p.a + p.b * p.b), p.multiplicity))
                    .collect();
                let cert = match product_no_solution_check(&factors, &a, tol) {
                    Ok(cert) => cert,
                    Err(Error::HypothesisViolated(_)) => return Err(unsupported(spec)),
                    Err(e) => return Err(CliError::solver(e)),
                };
                if !cert.applies {
                    return Err(unsupported(spec));
                }
                notes.push(cert.reason);
                ("certificate", AffineSolveOutcome::Empty)
            }
        }
    };
    Ok(Routed::Affine { route, outcome, notes })
}

fn unsupported(spec: &EquationSpec) -> CliError {
    CliError::solver(Error::InvalidInput(format!(
        "{spec}: no closed-form solver for this shape (supported: degree 1 or 2, a squared quadratic, \
         a product of quadratics without real roots against a singular right-hand side, or a scalar \
         right-hand side); try the oracle command"
    )))
}

pub fn solve_cmd(text: &str, cfg: &CliConfig) -> Result<Value, CliError> {
    let spec = parse(text)?;
    let mut m = base("solve", cfg);
    m.insert("equation".into(), json!(spec.to_string()));
    match route(&spec, &cfg.tolerances)? {
        Routed::Homogeneous { kappa, report } => {
            m.insert("route".into(), json!(if kappa == 0.0 { "homogeneous" } else { "scalar_rhs" }));
            m.insert("outcome".into(), json!("family"));
            m.insert("count".into(), Value::Null);
            m.insert("solutions".into(), json!([]));
            m.insert("residuals".into(), json!([]));
            analysis_fields(&mut m, &report);
            m.insert("notes".into(), json!(report.notes));
        }
        Routed::Affine { route, outcome, notes } => {
            m.insert("route".into(), json!(route));
            let (kind, orbits) = match &outcome {
                AffineSolveOutcome::Empty => ("empty", Vec::new()),
                AffineSolveOutcome::Finite(_) => ("finite", Vec::new()),
                AffineSolveOutcome::Family(ds) => ("family", ds.clone()),
            };
            let xs = outcome.solutions();
            m.insert("outcome".into(), json!(kind));
            m.insert("count".into(), json!(outcome.count()));
            m.insert("solutions".into(), matrices(xs));
            m.insert("residuals".into(), json!(xs.iter().map(|x| residual(&spec, x)).collect::<Vec<_>>()));
            m.insert("orbits".into(), orbit_list(&orbits));
            m.insert("notes".into(), json!(notes));
        }
    }
    Ok(Value::Object(m))
}

pub fn verify_cmd(text: &str, matrix: &str, cfg: &CliConfig) -> Result<Value, CliError> {
    let spec = parse(text)?;
    let x = parse_matrix(matrix)?;
    let tol = &cfg.tolerances;
    let r = residual(&spec, &x);
    let mut m = base("verify", cfg);
    m.insert("equation".into(), json!(spec.to_string()));
    m.insert("matrix".into(), json!(x.to_array()));
    m.insert("residuals".into(), json!([r]));
    m.insert("residual".into(), json!(r));
    let orbit = if spec.rhs.is_scalar(tol) {
        // Orbit membership only makes sense when the solution set is a union
        // of similarity orbits.
        let g = spec.f.shift_constant(-0.5 * spec.rhs.trace());
        let classifier = Classifier::new(&g, tol).map_err(CliError::solver)?;
        match classifier.classify(&x).map_err(CliError::solver)? {
            Classification::Orbit(d) => {
                m.insert("is_solution".into(), json!(true));
                Some(d)
            }
            Classification::NotASolution { .. } => {
                m.insert("is_solution".into(), json!(false));
                None
            }
        }
    } else {
        let bound = tol.eps_residual * (1.0 + spec.rhs.norm() + spec.f.abs_eval(x.norm()));
        m.insert("is_solution".into(), json!(r <= bound));
        None
    };
    m.insert("orbit".into(), json!(orbit));
    m.insert("orbit_label".into(), json!(orbit.map(|d| d.to_string())));
    Ok(Value::Object(m))
}

pub fn sample_cmd(text: &str, orbit: &str, count: usize, bound: f64, cfg: &CliConfig) -> Result<Value, CliError> {
    let spec = parse_homogeneous(text)?;
    let tol = &cfg.tolerances;
    let wanted = OrbitDescriptor::parse(orbit).map_err(CliError::input)?;
    let report = analyze(&spec.f, tol).map_err(CliError::solver)?;
    let d = *report.orbits.iter().find(|d| d.approx_eq(&wanted, tol)).ok_or_else(|| {
        let known: Vec<String> = report.orbits.iter().map(|d| d.to_string()).collect();
        CliError::input(format!("{wanted} is not an orbit of {spec}; its orbits are {}", known.join(", ")))
    })?;
    let xs = sample_orbit(&d, count, cfg.seed, bound, tol).map_err(CliError::solver)?;
    let mut m = base("sample", cfg);
    m.insert("equation".into(), json!(spec.to_string()));
    m.insert("orbit".into(), json!(d));
    m.insert("orbits".into(), orbit_list(&[d]));
    m.insert("box".into(), json!(bound));
    m.insert("count".into(), json!(xs.len()));
    m.insert("solutions".into(), matrices(&xs));
    m.insert("residuals".into(), json!(xs.iter().map(|x| residual(&spec, x)).collect::<Vec<_>>()));
    Ok(Value::Object(m))
}

pub fn compare_cmd(first: &str, second: &str, cfg: &CliConfig) -> Result<Value, CliError> {
    let tol = &cfg.tolerances;
    let (s1, s2) = (parse_homogeneous(first)?, parse_homogeneous(second)?);
    let r1 = analyze(&s1.f, tol).map_err(CliError::solver)?;
    let r2 = analyze(&s2.f, tol).map_err(CliError::solver)?;
    let cmp = compare_orbit_sets(&r1.orbits, &r2.orbits, tol);
    let mut m = base("compare", cfg);
    m.insert("equation".into(), json!([s1.to_string(), s2.to_string()]));
    m.insert("first".into(), json!({ "equation": s1.to_string(), "orbits": orbit_list(&r1.orbits) }));
    m.insert("second".into(), json!({ "equation": s2.to_string(), "orbits": orbit_list(&r2.orbits) }));
    m.insert("only_in_first".into(), orbit_list(&cmp.only_in_first));
    m.insert("only_in_second".into(), orbit_list(&cmp.only_in_second));
    m.insert("common".into(), orbit_list(&cmp.common));
    m.insert("equal".into(), json!(cmp.equal));
    Ok(Value::Object(m))
}

/// The report, and whether the crosscheck disagreed with the analytic answer.
pub fn oracle_cmd(text: &str, starts: usize, cfg: &CliConfig) -> Result<(Value, bool), CliError> {
    if starts == 0 {
        return Err(CliError::input("--starts must be at least 1"));
    }
    let spec = parse(text)?;
    let tol = &cfg.tolerances;
    let mut m = base("oracle", cfg);
    m.insert("equation".into(), json!(spec.to_string()));
    m.insert("starts".into(), json!(starts));
    let mut notes = Vec::new();
    let mut orbits = Vec::new();
    let (oracle, check) = match route(&spec, tol) {
        Ok(routed) => {
            let (name, analytic) = match &routed {
                Routed::Homogeneous { report, .. } => {
                    orbits.clone_from(&report.orbits);
                    ("homogeneous", Analytic::Homogeneous(report))
                }
                Routed::Affine { route, outcome, .. } => {
                    if let AffineSolveOutcome::Family(ds) = outcome {
                        orbits.clone_from(ds);
                    }
                    (*route, Analytic::Affine(outcome))
                }
            };
            let c = crosscheck(&spec, analytic, starts, cfg.seed, tol).map_err(CliError::solver)?;
            let verdict = json!({ "route": name, "consistent": c.consistent, "detail": c.detail });
            (c.oracle, Some((c.consistent, verdict)))
        }
        Err(e) if e.code == crate::EXIT_SOLVER => {
            notes.push(format!("no analytic answer to check against: {}", e.message));
            (newton_multistart(&spec, starts, cfg.seed, tol), None)
        }
        Err(e) => return Err(e),
    };
    if oracle.count == 0 {
        notes.push(format!("no solution found in {starts} starts; this is evidence, not a proof"));
    }
    m.insert("orbits".into(), orbit_list(&orbits));
    m.insert("count".into(), json!(oracle.count));
    m.insert("solutions".into(), matrices(&oracle.found));
    m.insert("residuals".into(), json!(oracle.found.iter().map(|x| residual(&spec, x)).collect::<Vec<_>>()));
    m.insert(
        "oracle".into(),
        json!({
            "count": oracle.count,
            "max_residual": oracle.max_residual,
            "best_residual": oracle.best_residual,
            "starts_used": oracle.starts_used,
        }),
    );
    let inconsistent = matches!(check, Some((false, _)));
    m.insert("crosscheck".into(), check.map(|c| c.1).unwrap_or(Value::Null));
    m.insert("notes".into(), json!(notes));
    Ok((Value::Object(m), inconsistent))
}
