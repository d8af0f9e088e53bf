//! End-to-end checks of the headline results, one line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use nalgebra::DMatrix;
use num_traits::Zero;
use polylyap::dynamics::{integrate_batch, SimConfig, Terminal};
use polylyap::linalg::hurwitz_test;
use polylyap::lyap::{
    coefficient_distance, converse_power_search, local_exp_stability, normalize, power_product,
    trajectory_check, verify_power, LyapunovCertificate, LyapunovProblem, LyapunovResult, PowerAttempt,
    PowerSearch,
};
use polylyap::poly::rational::{int, rat, to_f64};
use polylyap::poly::{
    binary_form_nonnegative, lie_derivative, norm_squared, parse_polynomial, Polynomial, Rational,
    VectorField,
};
use polylyap::reductions::{
    boolean_zero, gadget, gallery, motzkin, one_in_three_brute_force, quartic_to_gradient_field,
    rotation_pair, shifted_motzkin, GadgetBase, GadgetKind, GalleryParams, OneInThree, ReductionChain,
};
use polylyap::sos::{check_sos, rationalize_with_schedule, BasisMode, SosCertificate, SosVerdict};
use rand::Rng;

enum Status {
    Pass,
    Fail,
    /// Allowed outcome for an open-ended search.
    ExpectedUnknown,
}

type Check = Result<(Status, String), String>;

fn pass(detail: String) -> Check {
    Ok((Status::Pass, detail))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(id: u32, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f));
    let elapsed = start.elapsed();
    let (status, detail) = match outcome {
        Ok(Ok(r)) => r,
        Ok(Err(msg)) => (Status::Fail, msg),
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            (Status::Fail, format!("panicked: {msg}"))
        }
    };
    let (status, detail) = match (status, limit) {
        (Status::Pass, Some(l)) if elapsed > l => (Status::Fail, format!("{detail}; over the {l:?} limit")),
        (s, _) => (s, detail),
    };
    let label = match status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::ExpectedUnknown => "UNKNOWN (expected)",
    };
    let limit_txt = limit.map_or(String::new(), |l| format!(", limit {l:?}"));
    println!("{label} [{id:>2}] {title} ({:.2?}{limit_txt}): {detail}", elapsed);
    !matches!(status, Status::Fail)
}

fn sim_cfg() -> SimConfig {
    SimConfig {
        t_end: 10.0,
        ..Default::default()
    }
}

/// Certificate re-verification plus the 10-trajectory monotonicity check.
fn check_found(tag: &str, cert: &LyapunovCertificate, f: &VectorField, degree: u32) -> Result<(), String> {
    ensure(cert.verify(f, degree, 1e-7), || format!("{tag}: certificate does not re-verify"))?;
    let chk = trajectory_check(&cert.v, f, 10, &sim_cfg()).map_err(|e| e.to_string())?;
    ensure(chk.all_monotone(), || format!("{tag}: V increases along a simulated trajectory"))
}

fn infeasible(tag: &str, problem: &LyapunovProblem) -> Result<(), String> {
    match polylyap::lyap::search_sos_lyapunov(problem).map_err(|e| e.to_string())? {
        LyapunovResult::CertifiedInfeasible(c) => {
            ensure(c.verify(problem, 1e-7), || format!("{tag}: dual ray does not verify"))
        }
        r => Err(format!("{tag}: expected infeasible, got {}", r.label())),
    }
}

fn found(tag: &str, problem: &LyapunovProblem) -> Result<LyapunovCertificate, String> {
    match polylyap::lyap::search_sos_lyapunov(problem).map_err(|e| e.to_string())? {
        LyapunovResult::Found(c) => {
            check_found(tag, &c, &problem.field, problem.degree)?;
            Ok(c)
        }
        LyapunovResult::Indeterminate(m) => Err(format!("{tag}: indeterminate ({m})")),
        r => Err(format!("{tag}: expected found, got {}", r.label())),
    }
}

fn septic_sweep() -> Check {
    let f = gallery("septic-planar", &GalleryParams::default()).unwrap().field;
    for d in [2, 4, 6] {
        infeasible(&format!("degree {d}"), &LyapunovProblem::plain(f.clone(), d, true))?;
    }
    let cert = found("degree 8", &LyapunovProblem::new(f.clone(), 8, true))?;
    ensure(cert.v.homogeneous_degree() == Some(8), || "V is not an octic form".into())?;
    let dist = coefficient_distance(&normalize(&cert.v), &normalize(&reported_septic_v()));
    pass(format!(
        "degrees 2,4,6 infeasible with verified rays; degree 8 found (exact = {}), distance to reported V {dist:.2e}",
        cert.exact
    ))
}

fn motzkin_counterexample() -> Check {
    let f = gallery("motzkin-cx", &GalleryParams::default()).unwrap().field;
    let v = norm_squared(2).scale(&rat(1, 2));
    let vdot = lie_derivative(&v, &f).unwrap();
    ensure(&vdot + &shifted_motzkin() == Polynomial::zero(2), || "Vdot != -M(x1-1, x2-1)".into())?;
    infeasible("degree 2", &LyapunovProblem::plain(f.clone(), 2, false))?;
    let quartic = LyapunovProblem::plain(f.clone(), 4, false).with_margins(rat(1, 10_000), Rational::zero());
    let cert = found("degree 4", &quartic)?;
    pass(format!(
        "exact identity holds; degree 2 infeasible; degree 4 found (exact = {}, {} terms)",
        cert.exact,
        cert.v.len()
    ))
}

fn motzkin_not_sos() -> Check {
    let mut r = rng(3);
    let mut lines = Vec::new();
    for (name, p) in [("motzkin", motzkin()), ("shifted", shifted_motzkin())] {
        match check_sos(&p, BasisMode::default_for(&p)).map_err(|e| e.to_string())? {
            SosVerdict::NotSos(ev) => {
                ensure(ev.verify(&p, 1e-7), || format!("{name}: evidence does not verify"))?;
            }
            v => return Err(format!("{name}: expected NotSos, got {v:?}")),
        }
        let mut min = f64::INFINITY;
        for _ in 0..100_000 {
            let x = [r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)];
            min = min.min(p.evaluate_f64(&x).unwrap());
        }
        ensure(min >= -1e-12, || format!("{name}: negative sample {min}"))?;
        lines.push(format!("{name} min sample {min:.2e}"));
    }
    pass(format!("both NotSos with verified rays; {}", lines.join(", ")))
}

fn non_monotone_degrees() -> Check {
    let field = |theta: f64| {
        let p = GalleryParams {
            rotation: Some(rotation_pair(theta, 1000).unwrap()),
            ..Default::default()
        };
        gallery("non-monotone", &p).unwrap().field
    };
    let small = field(0.01);
    let c4 = found("theta 0.01 degree 4", &LyapunovProblem::new(small.clone(), 4, true))?;
    let quartic = parse_polynomial("x1^4 + x2^4", Some(2)).unwrap();
    let admissible = -lie_derivative(&quartic, &small).unwrap();
    ensure(
        binary_form_nonnegative(&admissible).unwrap(),
        || "x^4 + y^4 is not admissible at theta 0.01".into(),
    )?;
    infeasible("theta 0.01 degree 6", &LyapunovProblem::plain(small, 6, true))?;
    found("theta 0.1 degree 6", &LyapunovProblem::new(field(0.1), 6, true))?;
    pass(format!(
        "theta~0.01: degree 4 found (exact = {}), degree 6 infeasible; theta~0.1: degree 6 found",
        c4.exact
    ))
}

fn krstic() -> Check {
    let f = gallery("krstic", &GalleryParams::default()).unwrap().field;
    let mut verdicts = Vec::new();
    for d in [2, 4, 6, 8] {
        let r = polylyap::lyap::search_sos_lyapunov(&LyapunovProblem::new(f.clone(), d, false))
            .map_err(|e| e.to_string())?;
        ensure(!r.is_found(), || format!("degree {d} unexpectedly found"))?;
        verdicts.push(format!("{d}:{}", r.label()));
    }
    ensure(local_exp_stability(&f).unwrap(), || "linearization not Hurwitz".into())?;
    let x0s = polylyap::lyap::sample_points(2, 20, 3.0);
    let trajs = integrate_batch(&f, &x0s, &SimConfig::default()).unwrap();
    let converged = trajs.iter().filter(|t| t.terminal == Terminal::Converged).count();
    ensure(converged == 20, || format!("only {converged}/20 trajectories converged"))?;
    pass(format!("no Found ({}); locally exponentially stable; 20/20 trajectories converge", verdicts.join(" ")))
}

fn reduction_chain() -> Check {
    let mut r = rng(6);
    let (mut sat, mut unsat) = (0, 0);
    for k in 0..50 {
        let n = r.gen_range(3..=10);
        let m = r.gen_range(1..=n);
        let inst = random_instance(&mut r, n, m);
        let chain = ReductionChain::build(&inst).unwrap();
        let oracle = one_in_three_brute_force(&inst).unwrap();
        let zero = boolean_zero(&chain.quartic).unwrap();
        let eq = polylyap::dynamics::boolean_equilibria(&chain.field, true).unwrap();
        let sols = all_solutions(&inst);
        let want_eq: Vec<Vec<Rational>> = sols.iter().map(|a| polylyap::reductions::augmented_point(a)).collect();
        ensure(oracle.is_satisfiable() == zero.is_some(), || format!("instance {k}: oracle vs zero of p"))?;
        ensure(zero.is_some() == !eq.is_empty(), || format!("instance {k}: zero of p vs equilibrium"))?;
        ensure(eq == want_eq, || format!("instance {k}: equilibrium set differs from solution set"))?;
        if let OneInThree::Satisfiable(a) = &oracle {
            ensure(Some(a) == zero.as_ref(), || format!("instance {k}: witnesses differ"))?;
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    pass(format!("50 instances, {sat} satisfiable / {unsat} unsatisfiable, zero mismatches"))
}

fn random_rational_matrix(r: &mut impl Rng, n: usize) -> Vec<Vec<Rational>> {
    let shift = rat(r.gen_range(0..=60), 10);
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = rat(r.gen_range(-9..=9), r.gen_range(1..=4));
                    if i == j {
                        v - &shift
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect()
}

fn hurwitz_agreement() -> Check {
    let mut r = rng(7);
    let (mut stable, mut accepted) = (0, 0);
    while accepted < 500 {
        let n = r.gen_range(2..=6);
        let a = random_rational_matrix(&mut r, n);
        let m = DMatrix::from_fn(n, n, |i, j| to_f64(&a[i][j]));
        let max_re = m.complex_eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        if max_re.abs() <= 1e-3 {
            continue;
        }
        accepted += 1;
        let truth = max_re < 0.0;
        stable += truth as usize;
        ensure(hurwitz_test(&a).unwrap() == truth, || format!("disagreement on {a:?} (max re {max_re})"))?;
    }
    let neg_id = vec![vec![int(-1), int(0)], vec![int(0), int(-1)]];
    let rot = vec![vec![int(0), int(-1)], vec![int(1), int(0)]];
    ensure(hurwitz_test(&neg_id).unwrap(), || "-I rejected".into())?;
    ensure(!hurwitz_test(&rot).unwrap(), || "rotation generator accepted".into())?;
    pass(format!("500 matrices agree ({stable} Hurwitz); -I yes, rotation no"))
}

fn gadget_identities() -> Check {
    let mut r = rng(8);
    for k in 0..20 {
        let n = r.gen_range(2..=5);
        let v = random_nonzero_form(&mut r, n, 4, 5);
        let f = quartic_to_gradient_field(&v).unwrap();
        let wdot = lie_derivative(&norm_squared(n), &f).unwrap();
        ensure(wdot == v.scale(&int(-8)), || format!("form {k}: Wdot != -8V"))?;
        let g = gadget(GadgetKind::SemialgebraicInvariance, &GadgetBase::Form(v.clone())).unwrap();
        let (p, pdot, _) = g.identity.clone().unwrap();
        ensure(p == v && pdot == v.scale(&int(-4)), || format!("form {k}: pdot != -4p"))?;
        let b = gadget(GadgetKind::BallInvariance, &GadgetBase::Form(v)).unwrap();
        ensure(b.identity_holds(), || format!("form {k}: ball identity"))?;
    }
    pass("Wdot = -8V and pdot = -4p exactly for 20 random quartic forms".into())
}

fn property_suite() -> Check {
    let mut r = rng(9);
    for k in 0..100 {
        let n = r.gen_range(1..=4);
        let d = r.gen_range(0..=6);
        let p = random_form(&mut r, n, d, 20);
        ensure(p.euler_residual().unwrap().is_zero(), || format!("form {k}: Euler residual"))?;
    }
    let mut rational: Vec<(Polynomial, SosCertificate)> = Vec::new();
    let (mut pos, mut neg) = (0, 0);
    for k in 0..100 {
        let d = 2 * r.gen_range(1..=4);
        let p = if k % 2 == 0 {
            positive_binary_form(&mut r, d)
        } else {
            negative_binary_form(&mut r, d).0
        };
        let nonneg = binary_form_nonnegative(&p).unwrap();
        let verdict = check_sos(&p, BasisMode::Homogeneous).map_err(|e| e.to_string())?;
        match &verdict {
            SosVerdict::Sos(c) => {
                ensure(c.verify_float(&p, 1e-7), || format!("form {k}: certificate"))?;
                if let SosVerdict::Sos(exact) = rationalize_with_schedule(&p, c).map_err(|e| e.to_string())? {
                    if exact.gram.is_rational() {
                        rational.push((p.clone(), exact));
                    }
                }
            }
            SosVerdict::NotSos(ev) => ensure(ev.verify(&p, 1e-7), || format!("form {k}: evidence"))?,
            SosVerdict::Indeterminate(m) => return Err(format!("form {k}: indeterminate ({m})")),
        }
        ensure(nonneg == verdict.is_sos(), || format!("form {k}: oracle {nonneg} vs sos {}", verdict.is_sos()))?;
        if nonneg {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    for (k, (p, c)) in rational.iter().enumerate() {
        let back = SosCertificate::from_json(&c.to_json()).unwrap();
        ensure(c.verify_exact(p) && back.verify_exact(p), || format!("rational certificate {k}"))?;
    }
    pass(format!(
        "100 Euler residuals zero; 100 bivariate forms agree ({pos} nonnegative, {neg} not); {} rational certificates re-verify exactly",
        rational.len()
    ))
}

fn converse_power() -> Check {
    let f = gallery("motzkin-cx", &GalleryParams::default()).unwrap().field;
    let v = norm_squared(2).scale(&rat(1, 2));
    let res = converse_power_search(&v, &f, 10, true).map_err(|e| e.to_string())?;
    let failures = match &res {
        PowerSearch::FoundPower { failures, .. } | PowerSearch::NotFoundUpTo { failures, .. } => failures,
    };
    match failures.first() {
        Some((0, PowerAttempt::NotSos(ev))) => {
            let p0 = power_product(&v, &f, 0, true).unwrap();
            ensure(ev.verify(&p0, 1e-7), || "k = 0 evidence does not verify".into())?;
        }
        other => return Err(format!("k = 0 did not fail with evidence: {other:?}")),
    }
    match &res {
        PowerSearch::FoundPower { k, cert_wdot, .. } => {
            ensure(verify_power(&v, &f, true, &res, 1e-7), || "power certificate does not verify".into())?;
            pass(format!(
                "k = 0 not SOS (verified ray); k = {k} found (exact Gram = {})",
                cert_wdot.gram.is_rational()
            ))
        }
        PowerSearch::NotFoundUpTo { k_max, .. } => Ok((
            Status::ExpectedUnknown,
            format!("k = 0 not SOS (verified ray); no power up to {k_max}"),
        )),
    }
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let results = [
        run(1, "degree sweep on the degree-7 planar field", Some(s(30)), septic_sweep),
        run(2, "quadratic-infeasible, quartic-feasible counterexample", Some(s(10)), motzkin_counterexample),
        run(3, "Motzkin and shifted Motzkin are not SOS", Some(s(5)), motzkin_not_sos),
        run(4, "non-monotone degrees of homogeneous Lyapunov functions", Some(s(20)), non_monotone_degrees),
        run(5, "GAS quadratic field without polynomial Lyapunov function", Some(s(60)), krstic),
        run(6, "ONE-IN-THREE reduction chain equivalence", Some(s(60)), reduction_chain),
        run(7, "linear stability test against eigenvalues", None, hurwitz_agreement),
        run(8, "gadget derivative identities", None, gadget_identities),
        run(9, "property suite", None, property_suite),
        run(10, "converse power search", None, converse_power),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
