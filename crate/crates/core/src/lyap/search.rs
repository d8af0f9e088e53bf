//! Joint SOS search for a polynomial Lyapunov function:
//! `V - ε·Σxᵢᵈ` SOS and `-V̇ - ε′·Σxᵢᴰ` SOS, with `tr(Q_V) = 1`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::sdp::{SdpStatus, SolverOptions};
use crate::linalg::solve_sdp;
use crate::linalg::sym::SymMatrix;
use crate::poly::rational::{from_f64_exact, rat, Rational};
use crate::poly::{lie_derivative, power_sum, Monomial, Polynomial, VectorField};
use crate::sos::certificate::gram_polynomial;
use crate::sos::program::{rationalize_schedule, strictly_interior, ExactConstraint, GramProgram};
use crate::sos::{newton_basis, GramBasis, GramMatrix, SosCertificate};

/// Blocks closer than this (relative) to singular are reported with float
/// certificates instead of being rounded.
const INTERIOR_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovProblem {
    pub field: VectorField,
    pub degree: u32,
    pub homogeneous: bool,
    /// ε: `V - ε·Σxᵢᵈ` must be SOS.
    pub margin: Rational,
    /// ε′: `-V̇ - ε′·Σxᵢᴰ` must be SOS.
    pub margin_deriv: Rational,
}

impl LyapunovProblem {
    /// Default margins ε = ε′ = 10⁻⁴. The trace normalization keeps the Gram
    /// matrix of `V` at unit scale, so the margins are relative to it.
    pub fn new(field: VectorField, degree: u32, homogeneous: bool) -> Self {
        LyapunovProblem {
            field,
            degree,
            homogeneous,
            margin: rat(1, 10_000),
            margin_deriv: rat(1, 10_000),
        }
    }

    /// The plain conditions `V` SOS, `-V̇` SOS (both margins zero).
    pub fn plain(field: VectorField, degree: u32, homogeneous: bool) -> Self {
        LyapunovProblem {
            field,
            degree,
            homogeneous,
            margin: Rational::zero(),
            margin_deriv: Rational::zero(),
        }
    }

    pub fn with_margins(mut self, margin: Rational, margin_deriv: Rational) -> Self {
        self.margin = margin;
        self.margin_deriv = margin_deriv;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.degree == 0 || self.degree % 2 != 0 {
            return Err(Error::Invalid(format!("Lyapunov degree must be even and positive, got {}", self.degree)));
        }
        if self.margin.is_negative() || self.margin_deriv.is_negative() {
            return Err(Error::Invalid("margins must be nonnegative".into()));
        }
        if !self.field.vanishes_at_origin() {
            return Err(Error::Precondition("the field must vanish at the origin".into()));
        }
        if self.homogeneous && !self.field.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
        Ok(())
    }

    /// The Gram program together with the margin degree `D`.
    pub fn program(&self) -> Result<LyapunovProgram> {
        self.validate()?;
        let n = self.field.nvars();
        let d = self.degree;
        let basis_v = if self.homogeneous {
            GramBasis::new(Monomial::all_of_degree(n, d / 2))
        } else {
            GramBasis::new(Monomial::all_up_to(n, 1, d / 2))
        };
        let mut images: BTreeMap<Monomial, Polynomial> = BTreeMap::new();
        for i in 0..basis_v.len() {
            for j in 0..=i {
                let m = basis_v.get(i).mul(basis_v.get(j));
                if !images.contains_key(&m) {
                    let lm = lie_derivative(&Polynomial::term(m.clone(), Rational::one()), &self.field)?;
                    images.insert(m, -lm);
                }
            }
        }
        let margin_target = lie_derivative(&power_sum(n, d), &self.field)?.scale(&self.margin);
        let mut top: i64 = images.values().map(|p| p.degree()).max().unwrap_or(-1);
        top = top.max(margin_target.degree());
        let deriv_degree = if self.homogeneous {
            let k = self.field.homogeneous_degree().unwrap_or(1);
            let dd = d + k - 1;
            if dd % 2 != 0 {
                return Err(Error::OddDegree(dd as i64));
            }
            dd
        } else {
            (top.max(2) as u32) / 2 * 2
        };
        let deriv_margin = power_sum(n, deriv_degree).scale(&self.margin_deriv);
        let basis_d = if self.homogeneous {
            GramBasis::new(Monomial::all_of_degree(n, deriv_degree / 2))
        } else {
            let mut support: Vec<Monomial> = images.values().flat_map(|p| p.support().cloned()).collect();
            support.extend(margin_target.support().cloned());
            support.extend(deriv_margin.support().cloned());
            support.sort();
            support.dedup();
            newton_basis(n, &support)
        };
        let mut prog = GramProgram::new(n, vec![basis_v.clone(), basis_d.clone()]);
        for i in 0..basis_v.len() {
            for j in 0..=i {
                let m = basis_v.get(i).mul(basis_v.get(j));
                prog.add_gram_image(0, i, j, &images[&m]);
            }
        }
        for i in 0..basis_d.len() {
            for j in 0..=i {
                let m = basis_d.get(i).mul(basis_d.get(j));
                prog.add_gram_image(1, i, j, &-Polynomial::term(m, Rational::one()));
            }
        }
        prog.add_target(&margin_target);
        prog.add_target(&deriv_margin);
        prog.add_constraint(ExactConstraint {
            entries: (0..basis_v.len()).map(|i| (0, i, i, Rational::one())).collect(),
            rhs: Rational::one(),
        });
        Ok(LyapunovProgram { program: prog, deriv_degree })
    }
}

pub struct LyapunovProgram {
    pub program: GramProgram,
    pub deriv_degree: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovCertificate {
    pub v: Polynomial,
    /// SOS certificate of `V - ε·Σxᵢᵈ`.
    pub cert_v: SosCertificate,
    /// SOS certificate of `-V̇ - ε′·Σxᵢᴰ`.
    pub cert_vdot: SosCertificate,
    pub margin: Rational,
    pub margin_deriv: Rational,
    pub deriv_degree: u32,
    /// Both Gram matrices are rational and the identities hold exactly.
    pub exact: bool,
}

impl LyapunovCertificate {
    pub fn v_minus_margin(&self, degree: u32) -> Polynomial {
        &self.v - &power_sum(self.v.nvars(), degree).scale(&self.margin)
    }

    /// Re-checks both certificates against `field` (exactly when rational,
    /// within `tol` otherwise).
    pub fn verify(&self, field: &VectorField, degree: u32, tol: f64) -> bool {
        let n = field.nvars();
        let Ok(vdot) = lie_derivative(&self.v, field) else {
            return false;
        };
        let target_v = self.v_minus_margin(degree);
        let target_d = -vdot - power_sum(n, self.deriv_degree).scale(&self.margin_deriv);
        let v_at_zero = self.v.coeff(&Monomial::one(n));
        if !v_at_zero.is_zero() {
            return false;
        }
        if self.exact {
            self.cert_v.verify_exact(&target_v) && self.cert_vdot.verify_exact(&target_d)
        } else {
            self.cert_v.verify_float(&target_v, tol) && self.cert_vdot.verify_float(&target_d, tol)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfeasibilityCertificate {
    /// Farkas ray, one weight per constraint of [`LyapunovProblem::program`],
    /// scaled so that `bᵀy = -1`.
    pub ray: Vec<f64>,
}

impl InfeasibilityCertificate {
    pub fn verify(&self, problem: &LyapunovProblem, tol: f64) -> bool {
        match problem.program() {
            Ok(p) => p.program.to_sdp().verify_farkas(&self.ray, tol),
            Err(_) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LyapunovResult {
    Found(LyapunovCertificate),
    CertifiedInfeasible(InfeasibilityCertificate),
    Indeterminate(String),
}

impl LyapunovResult {
    pub fn label(&self) -> &'static str {
        match self {
            LyapunovResult::Found(_) => "found",
            LyapunovResult::CertifiedInfeasible(_) => "infeasible",
            LyapunovResult::Indeterminate(_) => "indeterminate",
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, LyapunovResult::Found(_))
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LyapunovResult::CertifiedInfeasible(_))
    }
}

pub fn search_sos_lyapunov(problem: &LyapunovProblem) -> Result<LyapunovResult> {
    search_sos_lyapunov_with(problem, &SolverOptions::default())
}

pub fn search_sos_lyapunov_with(problem: &LyapunovProblem, opts: &SolverOptions) -> Result<LyapunovResult> {
    let LyapunovProgram { program, deriv_degree } = problem.program()?;
    let sdp = program.to_sdp();
    let sol = solve_sdp(&sdp, opts)?;
    let n = problem.field.nvars();
    let margin_v = power_sum(n, problem.degree).scale(&problem.margin);
    match sol.status {
        SdpStatus::Infeasible => Ok(LyapunovResult::CertifiedInfeasible(InfeasibilityCertificate { ray: sol.dual })),
        SdpStatus::Indeterminate => Ok(LyapunovResult::Indeterminate(sol.message)),
        SdpStatus::Feasible => {
            let blocks = program.blocks();
            let rounded = if strictly_interior(&sol.primal, INTERIOR_MARGIN) {
                rationalize_schedule(&program, &sol.primal)
            } else {
                None
            };
            let cert = match rounded {
                Some((q, _)) => {
                    let v = gram_polynomial(&blocks[0], &q[0], n) + margin_v;
                    LyapunovCertificate {
                        v,
                        cert_v: SosCertificate {
                            basis: blocks[0].clone(),
                            gram: GramMatrix::Rational(q[0].clone()),
                            squares: None,
                        },
                        cert_vdot: SosCertificate {
                            basis: blocks[1].clone(),
                            gram: GramMatrix::Rational(q[1].clone()),
                            squares: None,
                        },
                        margin: problem.margin.clone(),
                        margin_deriv: problem.margin_deriv.clone(),
                        deriv_degree,
                        exact: true,
                    }
                }
                None => float_certificate(problem, blocks, &sol.primal, deriv_degree)?,
            };
            let tol = opts.feas_tol.max(1e-7);
            if cert.verify(&problem.field, problem.degree, tol) {
                Ok(LyapunovResult::Found(cert))
            } else {
                Ok(LyapunovResult::Indeterminate(
                    "solver point did not survive certificate verification".into(),
                ))
            }
        }
    }
}

fn float_certificate(
    problem: &LyapunovProblem,
    blocks: &[GramBasis],
    primal: &[SymMatrix<f64>],
    deriv_degree: u32,
) -> Result<LyapunovCertificate> {
    let n = problem.field.nvars();
    let q1 = primal[0].map(|v| from_f64_exact(*v).unwrap_or_else(Rational::zero));
    let v = gram_polynomial(&blocks[0], &q1, n) + power_sum(n, problem.degree).scale(&problem.margin);
    Ok(LyapunovCertificate {
        v,
        cert_v: SosCertificate { basis: blocks[0].clone(), gram: GramMatrix::Float(primal[0].clone()), squares: None },
        cert_vdot: SosCertificate {
            basis: blocks[1].clone(),
            gram: GramMatrix::Float(primal[1].clone()),
            squares: None,
        },
        margin: problem.margin.clone(),
        margin_deriv: problem.margin_deriv.clone(),
        deriv_degree,
        exact: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub homogeneous: bool,
    /// `None` uses the defaults of [`LyapunovProblem::new`].
    pub margins: Option<(Rational, Rational)>,
    pub stop_on_found: bool,
    pub solver: SolverOptions,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            homogeneous: false,
            margins: None,
            stop_on_found: false,
            solver: SolverOptions::default(),
        }
    }
}

pub fn degree_sweep(
    field: &VectorField,
    degrees: &[u32],
    cfg: &SweepConfig,
) -> Result<Vec<(u32, LyapunovResult)>> {
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("sweep degrees must be strictly ascending".into()));
    }
    let mut out = Vec::new();
    for &d in degrees {
        let mut problem = LyapunovProblem::new(field.clone(), d, cfg.homogeneous);
        if let Some((e, e2)) = &cfg.margins {
            problem = problem.with_margins(e.clone(), e2.clone());
        }
        let res = search_sos_lyapunov_with(&problem, &cfg.solver)?;
        let found = res.is_found();
        out.push((d, res));
        if found && cfg.stop_on_found {
            break;
        }
    }
    Ok(out)
}

/// Scales `v` so that its largest coefficient has absolute value one.
pub fn normalize(v: &Polynomial) -> Polynomial {
    let m = v.max_abs_coeff();
    if m.is_zero() {
        v.clone()
    } else {
        v.scale(&(BigRational::one() / m))
    }
}

/// Largest coefficient difference after both sides are normalized to a
/// unit largest coefficient (up to sign).
pub fn coefficient_distance(a: &Polynomial, b: &Polynomial) -> f64 {
    let (a, b) = (normalize(a), normalize(b));
    a.max_abs_diff(&b).min(a.max_abs_diff(&-b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_vector_field;

    fn field(s: &str) -> VectorField {
        parse_vector_field(s).unwrap()
    }

    #[test]
    fn linear_decay_finds_quadratic() {
        let f = field("dx1 = -x1");
        let res = search_sos_lyapunov(&LyapunovProblem::new(f.clone(), 2, true)).unwrap();
        let LyapunovResult::Found(cert) = res else { panic!("{res:?}") };
        assert!(cert.exact);
        // V ∝ x², and trace normalization fixes V = x² + ε x²
        assert_eq!(cert.v.len(), 1);
        assert!(cert.verify(&f, 2, 1e-9));
    }

    #[test]
    fn rotation_has_no_strict_quadratic() {
        let f = field("dx1 = x2\ndx2 = -x1");
        let res = search_sos_lyapunov(&LyapunovProblem::new(f.clone(), 2, true)).unwrap();
        let prob = LyapunovProblem::new(f, 2, true);
        match res {
            LyapunovResult::CertifiedInfeasible(c) => assert!(c.verify(&prob, 1e-8)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn odd_derivative_degree_rejected() {
        let f = field("dx1 = -x1^2\ndx2 = -x2^2");
        assert!(LyapunovProblem::new(f, 2, true).program().is_err());
    }

    #[test]
    fn scaled_field_still_found() {
        let f = field("dx1 = -x1 + x2\ndx2 = -x1 - x2");
        let g = f.scale(&crate::poly::rational::int(2));
        for ff in [f, g] {
            let res = search_sos_lyapunov(&LyapunovProblem::new(ff, 2, true)).unwrap();
            assert!(res.is_found(), "{res:?}");
        }
    }

    #[test]
    fn nonhomogeneous_v_has_no_low_terms() {
        // V = x1² + c·x2² + a·x2⁴ works once a ≥ 1/8; a strict x1⁴ margin cannot
        let f = field("dx1 = -x1 + x2^2\ndx2 = -x2");
        let strict = search_sos_lyapunov(&LyapunovProblem::new(f.clone(), 4, false)).unwrap();
        assert!(strict.is_infeasible(), "{strict:?}");
        let res = search_sos_lyapunov(&LyapunovProblem::plain(f, 4, false)).unwrap();
        let LyapunovResult::Found(cert) = res else { panic!("{res:?}") };
        assert!(cert.v.terms().all(|(m, _)| m.degree() >= 2));
    }
}
