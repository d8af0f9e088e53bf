//! Local exponential stability through the linearization, and the
//! `W = ‖x‖²` check for gradient fields of quartic forms.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::exact::hurwitz_test;
use crate::linalg::sdp::SolverOptions;
use crate::poly::rational::{int, rat, Rational};
use crate::poly::{binary_form_positive_definite, lie_derivative, norm_squared, Polynomial, VectorField};
use crate::sos::{check_sos_with, BasisMode};

/// Whether the linearization at the origin is Hurwitz (exact test).
pub fn local_exp_stability(field: &VectorField) -> Result<bool> {
    if !field.vanishes_at_origin() {
        return Err(Error::Precondition("the field must vanish at the origin".into()));
    }
    hurwitz_test(&field.linearization())
}

#[derive(Debug, Clone, PartialEq)]
pub enum GradientVerdict {
    Valid,
    /// A nonzero point with `V(x) ≤ 0`, so `Ẇ = -8V` fails to be negative there.
    Invalid(Vec<Rational>),
    /// `V` is not positive definite but no rational witness was located.
    InvalidNoWitness,
    Indeterminate(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientCheck {
    pub field: VectorField,
    /// `Ẇ` for `W = ‖x‖²` along `-∇V`.
    pub wdot: Polynomial,
    /// `Ẇ == -8V` holds exactly.
    pub identity_holds: bool,
    pub verdict: GradientVerdict,
}

const ENUMERATION_CAP: usize = 16;

fn witness_candidates(n: usize) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    if n <= ENUMERATION_CAP {
        // boolean points first: these are the zeros the hardness reduction plants
        for mask in 1u64..(1u64 << n) {
            out.push((0..n).map(|i| int(((mask >> i) & 1) as i64)).collect());
        }
    }
    if n <= 4 {
        let span = 5usize.pow(n as u32);
        for code in 0..span {
            let mut c = code;
            let mut v = Vec::with_capacity(n);
            for _ in 0..n {
                v.push(int((c % 5) as i64 - 2));
                c /= 5;
            }
            if v.iter().any(|x| !x.is_zero()) {
                out.push(v);
            }
        }
    }
    out
}

/// Forms `-∇V`, confirms `Ẇ = -8V` for `W = ‖x‖²`, and decides whether
/// `W` is a valid Lyapunov function, i.e. whether `V` is positive definite.
pub fn gradient_quadratic_check(v: &Polynomial) -> Result<GradientCheck> {
    if v.homogeneous_degree() != Some(4) || v.is_zero() {
        return Err(Error::WrongDegree { expected: 4, found: v.degree() });
    }
    let n = v.nvars();
    let field = VectorField::negative_gradient(v)?;
    let wdot = lie_derivative(&norm_squared(n), &field)?;
    let identity_holds = wdot == v.scale(&int(-8));
    for point in witness_candidates(n) {
        if !v.evaluate(&point)?.is_positive() {
            return Ok(GradientCheck { field, wdot, identity_holds, verdict: GradientVerdict::Invalid(point) });
        }
    }
    let verdict = if n == 1 {
        GradientVerdict::Valid
    } else if n == 2 {
        if binary_form_positive_definite(v)? {
            GradientVerdict::Valid
        } else {
            GradientVerdict::InvalidNoWitness
        }
    } else {
        let probe = v - &norm_squared(n).pow(2).scale(&rat(1, 1_000_000));
        match check_sos_with(&probe, BasisMode::Homogeneous, &SolverOptions::default())? {
            s if s.is_sos() => GradientVerdict::Valid,
            _ => GradientVerdict::Indeterminate("positive definiteness not decided".into()),
        }
    };
    Ok(GradientCheck { field, wdot, identity_holds, verdict })
}
