//! Constructive converse search: multiply `-2V·V̇` by even powers of `V`
//! until the product is SOS, giving the Lyapunov function `W = V^{2k+2}`.

use crate::error::{check_dim, Error, Result};
use crate::linalg::sdp::SolverOptions;
use crate::poly::rational::{int, rat};
use crate::poly::{binary_form_positive_definite, lie_derivative, norm_squared, Polynomial, VectorField};
use crate::sos::{
    check_sos_with, rationalize_with_schedule, square_certificate, BasisMode, GramMatrix, NotSosEvidence,
    SosCertificate, SosVerdict,
};

/// `W = V²`. Its derivative `2V·V̇` inherits negative definiteness from
/// `V̇`, but `-Ẇ` need not be a sum of squares.
pub fn square_lyapunov(v: &Polynomial) -> Polynomial {
    v * v
}

#[derive(Debug, Clone, PartialEq)]
pub enum PowerAttempt {
    NotSos(NotSosEvidence),
    Indeterminate(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PowerSearch {
    FoundPower {
        k: u32,
        /// `V^{2k+2}` (homogeneous mode) or `(V+1)^{2k+2}` (planar mode).
        w: Polynomial,
        /// Exact certificate that `W` is the square of `V^{k+1}`.
        cert_w: SosCertificate,
        /// Certificate of `-Ẇ = (k+1)·(-2V·V̇)·V^{2k}`.
        cert_wdot: SosCertificate,
        /// Failed powers below `k`, with their evidence.
        failures: Vec<(u32, PowerAttempt)>,
    },
    NotFoundUpTo {
        k_max: u32,
        failures: Vec<(u32, PowerAttempt)>,
    },
}

/// The product tested at power `k`: `(-2V·V̇)·V^{2k}` with `V` replaced by
/// `V + 1` in planar mode.
pub fn power_product(v: &Polynomial, field: &VectorField, k: u32, planar: bool) -> Result<Polynomial> {
    let base = if planar { v + &Polynomial::one(v.nvars()) } else { v.clone() };
    let vdot = lie_derivative(v, field)?;
    Ok((&base * &vdot).scale(&int(-2)) * base.pow(2 * k))
}

fn check_preconditions(v: &Polynomial, field: &VectorField, planar: bool, opts: &SolverOptions) -> Result<()> {
    check_dim(field.nvars(), v.nvars())?;
    if planar {
        if v.nvars() != 2 {
            return Err(Error::Precondition("planar mode needs exactly two variables".into()));
        }
        let top = v.degree();
        if top < 2 || top % 2 != 0 {
            return Err(Error::Precondition("V must have even degree at least 2".into()));
        }
        let lead = v.homogeneous_component(top as u32);
        if !binary_form_positive_definite(&lead)? {
            return Err(Error::Precondition(
                "highest-degree component of V is not positive definite".into(),
            ));
        }
        return Ok(());
    }
    if !v.is_homogeneous() || !field.is_homogeneous() {
        return Err(Error::Precondition("homogeneous mode needs a homogeneous V and field".into()));
    }
    let d = v.degree();
    if d < 2 || d % 2 != 0 {
        return Err(Error::Precondition("V must be a form of even degree".into()));
    }
    let probe = v - &norm_squared(v.nvars()).pow(d as u32 / 2).scale(&rat(1, 1_000_000));
    if v.nvars() == 2 {
        if !binary_form_positive_definite(v)? {
            return Err(Error::Precondition("V is not positive definite".into()));
        }
    } else if !check_sos_with(&probe, BasisMode::Homogeneous, opts)?.is_sos() {
        return Err(Error::Precondition("V could not be confirmed positive definite".into()));
    }
    Ok(())
}

pub fn converse_power_search(v: &Polynomial, field: &VectorField, k_max: u32, planar: bool) -> Result<PowerSearch> {
    converse_power_search_with(v, field, k_max, planar, &SolverOptions::default())
}

pub fn converse_power_search_with(
    v: &Polynomial,
    field: &VectorField,
    k_max: u32,
    planar: bool,
    opts: &SolverOptions,
) -> Result<PowerSearch> {
    check_preconditions(v, field, planar, opts)?;
    let base = if planar { v + &Polynomial::one(v.nvars()) } else { v.clone() };
    let mode = if planar { BasisMode::Newton } else { BasisMode::Homogeneous };
    let mut failures = Vec::new();
    for k in 0..=k_max {
        let q = power_product(v, field, k, planar)?;
        let verdict = check_sos_with(&q, mode, opts)?;
        match verdict {
            SosVerdict::Sos(cert) => {
                let cert = match rationalize_with_schedule(&q, &cert)? {
                    SosVerdict::Sos(exact) => exact,
                    _ => cert,
                };
                let factor = int(k as i64 + 1);
                let gram = match &cert.gram {
                    GramMatrix::Float(m) => GramMatrix::Float(m.map(|x| x * (k as f64 + 1.0))),
                    GramMatrix::Rational(m) => GramMatrix::Rational(m.map(|x| x * &factor)),
                };
                let cert_wdot = SosCertificate { basis: cert.basis.clone(), gram, squares: None };
                let root = base.pow(k + 1);
                return Ok(PowerSearch::FoundPower {
                    k,
                    w: root.pow(2),
                    cert_w: square_certificate(&root),
                    cert_wdot,
                    failures,
                });
            }
            SosVerdict::NotSos(e) => failures.push((k, PowerAttempt::NotSos(e))),
            SosVerdict::Indeterminate(m) => failures.push((k, PowerAttempt::Indeterminate(m))),
        }
    }
    Ok(PowerSearch::NotFoundUpTo { k_max, failures })
}

/// Checks a `FoundPower` result: `W` is the stated power, `cert_w` proves
/// `W` SOS and `cert_wdot` proves `-Ẇ` SOS.
pub fn verify_power(v: &Polynomial, field: &VectorField, planar: bool, found: &PowerSearch, tol: f64) -> bool {
    let PowerSearch::FoundPower { k, w, cert_w, cert_wdot, .. } = found else {
        return false;
    };
    let base = if planar { v + &Polynomial::one(v.nvars()) } else { v.clone() };
    if *w != base.pow(2 * k + 2) || !cert_w.verify_exact(w) {
        return false;
    }
    let Ok(wdot) = lie_derivative(w, field) else {
        return false;
    };
    let target = -wdot;
    if cert_wdot.gram.is_rational() {
        cert_wdot.verify_exact(&target)
    } else {
        cert_wdot.verify_float(&target, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, parse_vector_field};

    #[test]
    fn square_of_quadratic() {
        let v = parse_polynomial("1/2*x1^2 + 1/2*x2^2", Some(2)).unwrap();
        let w = square_lyapunov(&v);
        assert_eq!(w, parse_polynomial("1/4*(x1^2 + x2^2)^2", Some(2)).unwrap());
        assert_eq!(square_lyapunov(&parse_polynomial("x1^2", Some(1)).unwrap()).degree(), 4);
    }

    #[test]
    fn gradient_flow_needs_no_power() {
        let v = parse_polynomial("1/4*(x1^2 + x2^2)^2", Some(2)).unwrap();
        let f = VectorField::negative_gradient(&v).unwrap();
        let res = converse_power_search(&v, &f, 3, false).unwrap();
        assert!(matches!(res, PowerSearch::FoundPower { k: 0, .. }), "{res:?}");
        assert!(verify_power(&v, &f, false, &res, 1e-7));
    }

    #[test]
    fn rotated_quartic_needs_no_power() {
        let v = parse_polynomial("x1^4 + x2^4", Some(2)).unwrap();
        let f = parse_vector_field("dx1 = -1/10*x1^3 + 995/1000*x2^3\ndx2 = -995/1000*x1^3 - 1/10*x2^3").unwrap();
        assert_eq!(
            lie_derivative(&v, &f).unwrap(),
            parse_polynomial("-4/10*(x1^6 + x2^6)", Some(2)).unwrap()
        );
        let res = converse_power_search(&v, &f, 2, false).unwrap();
        assert!(matches!(res, PowerSearch::FoundPower { k: 0, .. }), "{res:?}");
        assert!(verify_power(&v, &f, false, &res, 1e-7));
    }

    #[test]
    fn preconditions_are_reported() {
        let v = parse_polynomial("x1^2 - x2^2", Some(2)).unwrap();
        let f = parse_vector_field("dx1 = -x1\ndx2 = -x2").unwrap();
        assert!(matches!(converse_power_search(&v, &f, 1, false), Err(Error::Precondition(_))));
        let v3 = parse_polynomial("x1^2 + x2^2 + x3^2", Some(3)).unwrap();
        let f3 = parse_vector_field("dx1 = -x1\ndx2 = -x2\ndx3 = -x3").unwrap();
        assert!(matches!(converse_power_search(&v3, &f3, 1, true), Err(Error::Precondition(_))));
    }
}
