//! Deciding "p is a sum of squares" through the Gram SDP.

use num_traits::{Signed, Zero};

use super::basis::{monomial_basis, BasisMode, GramBasis};
use super::certificate::{GramMatrix, SosCertificate};
use super::program::{denominator_schedule, rationalize_blocks, strictly_interior, GramProgram};
use crate::error::{Error, Result};
use crate::linalg::eig::{eig_min, symmetric_eigen};
use crate::linalg::sdp::{SdpProblem, SdpStatus, SolverOptions};
use crate::linalg::sym::SymMatrix;
use crate::linalg::solve_sdp;
use crate::poly::rational::{from_f64_exact, int, to_f64, Rational};
use crate::poly::{Monomial, Polynomial};

#[derive(Debug, Clone, PartialEq)]
pub enum NotSosEvidence {
    /// Linear functional on coefficient vectors, one weight per monomial,
    /// scaled so that it equals -1 on `p` and nonnegative (up to solver
    /// tolerance) on every square of a polynomial spanned by `basis`.
    DualRay { basis: GramBasis, ray: Vec<(Monomial, f64)> },
    OddDegree(i64),
    NegativeAt { point: Vec<Rational>, value: Rational },
}

impl NotSosEvidence {
    /// Value of the functional on `q`.
    pub fn functional(ray: &[(Monomial, f64)], q: &Polynomial) -> f64 {
        ray.iter().map(|(m, w)| w * to_f64(&q.coeff(m))).sum()
    }

    /// Moment-style matrix `H_ij = ℓ(z_i z_j)`; `ℓ(q²) = cᵀHc` for `q = cᵀz`.
    pub fn ray_matrix(basis: &GramBasis, ray: &[(Monomial, f64)]) -> SymMatrix<f64> {
        SymMatrix::from_fn(basis.len(), |i, j| {
            let m = basis.get(i).mul(basis.get(j));
            ray.iter().filter(|(r, _)| *r == m).map(|(_, w)| *w).sum()
        })
    }

    pub fn verify(&self, p: &Polynomial, tol: f64) -> bool {
        match self {
            NotSosEvidence::OddDegree(d) => p.degree() == *d && d % 2 != 0,
            NotSosEvidence::NegativeAt { point, value } => {
                value.is_negative() && p.evaluate(point).map(|v| v == *value).unwrap_or(false)
            }
            NotSosEvidence::DualRay { basis, ray } => {
                let lp = Self::functional(ray, p);
                if !(lp < 0.0) {
                    return false;
                }
                let scaled: Vec<(Monomial, f64)> = ray.iter().map(|(m, w)| (m.clone(), w / -lp)).collect();
                basis.is_empty() || eig_min(&Self::ray_matrix(basis, &scaled)) >= -tol
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SosVerdict {
    Sos(SosCertificate),
    NotSos(NotSosEvidence),
    Indeterminate(String),
}

impl SosVerdict {
    pub fn is_sos(&self) -> bool {
        matches!(self, SosVerdict::Sos(_))
    }

    pub fn is_not_sos(&self) -> bool {
        matches!(self, SosVerdict::NotSos(_))
    }
}

/// The Gram feasibility SDP for `p = zᵀQz`.
pub fn compile_sos(p: &Polynomial, basis: &GramBasis) -> Result<SdpProblem> {
    if basis.is_empty() {
        return Err(Error::BasisCoverage("empty basis".into()));
    }
    let prog = GramProgram::single(p, basis);
    let missing = prog.uncovered();
    if let Some(m) = missing.first() {
        return Err(Error::BasisCoverage(format!("monomial {m} is not a product of basis elements")));
    }
    Ok(prog.to_sdp())
}

fn probe_points(n: usize) -> Vec<Vec<Rational>> {
    let mut pts = vec![vec![Rational::zero(); n], vec![int(1); n], vec![int(-1); n]];
    for i in 0..n {
        for s in [1, -1] {
            let mut v = vec![Rational::zero(); n];
            v[i] = int(s);
            pts.push(v);
        }
    }
    pts
}

pub fn check_sos(p: &Polynomial, mode: BasisMode) -> Result<SosVerdict> {
    check_sos_with(p, mode, &SolverOptions::default())
}

pub fn check_sos_with(p: &Polynomial, mode: BasisMode, opts: &SolverOptions) -> Result<SosVerdict> {
    let n = p.nvars();
    let deg = p.degree();
    if deg < 0 {
        return Ok(SosVerdict::Sos(SosCertificate::zero(n)));
    }
    if deg % 2 != 0 {
        return Ok(SosVerdict::NotSos(NotSosEvidence::OddDegree(deg)));
    }
    for point in probe_points(n) {
        let value = p.evaluate(&point)?;
        if value.is_negative() {
            return Ok(SosVerdict::NotSos(NotSosEvidence::NegativeAt { point, value }));
        }
    }
    if deg == 0 {
        return Ok(SosVerdict::Sos(SosCertificate::constant(n, &p.coeff(&Monomial::one(n)))));
    }
    let basis = monomial_basis(p, mode)?;
    let prog = GramProgram::single(p, &basis);
    if let Some(m) = prog.uncovered().first() {
        let c = to_f64(&p.coeff(m));
        return Ok(SosVerdict::NotSos(NotSosEvidence::DualRay {
            basis,
            ray: vec![(m.clone(), -1.0 / c)],
        }));
    }
    let sdp = prog.to_sdp();
    let sol = solve_sdp(&sdp, opts)?;
    Ok(match sol.status {
        SdpStatus::Feasible => SosVerdict::Sos(SosCertificate {
            basis,
            gram: GramMatrix::Float(sol.primal[0].clone()),
            squares: None,
        }),
        SdpStatus::Infeasible => {
            let ray = prog
                .row_monomials()
                .into_iter()
                .zip(sol.dual.iter().copied())
                .filter(|(_, w)| *w != 0.0)
                .collect();
            SosVerdict::NotSos(NotSosEvidence::DualRay { basis, ray })
        }
        SdpStatus::Indeterminate => SosVerdict::Indeterminate(sol.message),
    })
}

/// Squares `qᵢ` with `Σ qᵢ² ≈ zᵀQz` from the eigendecomposition of `Q`.
pub fn extract_decomposition(cert: &SosCertificate, nvars: usize) -> Result<Vec<Polynomial>> {
    let q = cert.gram.to_f64();
    let scale = q.max_abs().max(1.0);
    let (vals, vecs) = symmetric_eigen(&q);
    if vals.first().copied().unwrap_or(0.0) < -1e-8 * scale {
        return Err(Error::Precondition(format!(
            "Gram matrix is indefinite (smallest eigenvalue {:.3e})",
            vals[0]
        )));
    }
    let mut out = Vec::new();
    for (lam, v) in vals.iter().zip(&vecs) {
        if *lam <= 1e-14 * scale {
            continue;
        }
        let r = lam.sqrt();
        let terms = cert
            .basis
            .monomials()
            .iter()
            .zip(v)
            .filter_map(|(m, c)| from_f64_exact(r * c).map(|c| (m.clone(), c)));
        out.push(Polynomial::from_terms(nvars, terms)?);
    }
    Ok(out)
}

const SINGULAR_BOUND_LIMIT: u64 = 10_000;

/// Rounds a float certificate to rationals with denominators at most
/// `denominator_bound`, projects exactly onto the Gram constraints and
/// checks PSD exactly. Failure gives `Indeterminate`, never `NotSos`.
pub fn rationalize_certificate(
    p: &Polynomial,
    cert: &SosCertificate,
    denominator_bound: u64,
) -> Result<SosVerdict> {
    rationalize_over(p, cert, &[denominator_bound])
}

/// [`rationalize_certificate`] over the bounds 10², 2·10², … up to 10¹².
pub fn rationalize_with_schedule(p: &Polynomial, cert: &SosCertificate) -> Result<SosVerdict> {
    rationalize_over(p, cert, &denominator_schedule())
}

fn rationalize_over(p: &Polynomial, cert: &SosCertificate, bounds: &[u64]) -> Result<SosVerdict> {
    if let GramMatrix::Rational(_) = cert.gram {
        return Ok(if cert.verify_exact(p) {
            SosVerdict::Sos(cert.clone())
        } else {
            SosVerdict::Indeterminate("rational certificate does not verify".into())
        });
    }
    if cert.gram.dim() != cert.basis.len() {
        return Err(Error::Invalid("Gram size does not match the basis".into()));
    }
    let prog = GramProgram::single(p, &cert.basis);
    if let Some(m) = prog.uncovered().first() {
        return Err(Error::BasisCoverage(format!("monomial {m} is not a product of basis elements")));
    }
    let proj = prog.projector();
    let blocks = [cert.gram.to_f64()];
    // a singular Gram matrix can only round onto an exact face at small
    // denominators; larger bounds are hopeless and slow
    let interior = strictly_interior(&blocks, 1e-9);
    for &d in bounds.iter().filter(|&&d| interior || d <= SINGULAR_BOUND_LIMIT) {
        if let Some(q) = rationalize_blocks(&prog, &proj, &blocks, d) {
            let out = SosCertificate {
                basis: cert.basis.clone(),
                gram: GramMatrix::Rational(q.into_iter().next().expect("one block")),
                squares: None,
            };
            debug_assert!(out.verify_exact(p));
            return Ok(SosVerdict::Sos(out));
        }
    }
    Ok(SosVerdict::Indeterminate(format!(
        "no PSD rational Gram matrix found with denominators up to {}",
        bounds.last().copied().unwrap_or(0)
    )))
}
