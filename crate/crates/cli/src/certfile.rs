//! Self-contained certificate documents and their independent re-verification.

use polylyap::lyap::{
    verify_power, InfeasibilityCertificate, LyapunovCertificate, LyapunovProblem, PowerSearch,
};
use polylyap::poly::rational::{format_rational, parse_rational};
use polylyap::poly::{parse_polynomial, parse_vector_field, Monomial, Polynomial, Rational, VectorField};
use polylyap::reductions::{parse_cnf, CnfInstance};
use polylyap::sos::{CertificateJson, GramBasis, NotSosEvidence, SosCertificate};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Evidence {
    /// Weights of a separating functional, keyed by monomial exponents.
    DualRay { basis: Vec<Vec<u32>>, ray: Vec<(Vec<u32>, f64)> },
    OddDegree { degree: i64 },
    NegativeAt { point: Vec<String>, value: String },
}

impl Evidence {
    pub fn from_core(ev: &NotSosEvidence) -> Self {
        match ev {
            NotSosEvidence::DualRay { basis, ray } => Evidence::DualRay {
                basis: basis.monomials().iter().map(|m| m.exponents().to_vec()).collect(),
                ray: ray.iter().map(|(m, w)| (m.exponents().to_vec(), *w)).collect(),
            },
            NotSosEvidence::OddDegree(d) => Evidence::OddDegree { degree: *d },
            NotSosEvidence::NegativeAt { point, value } => Evidence::NegativeAt {
                point: point.iter().map(format_rational).collect(),
                value: format_rational(value),
            },
        }
    }

    fn to_core(&self) -> Result<NotSosEvidence, String> {
        Ok(match self {
            Evidence::DualRay { basis, ray } => NotSosEvidence::DualRay {
                basis: GramBasis::new(basis.iter().cloned().map(Monomial::new).collect()),
                ray: ray.iter().map(|(e, w)| (Monomial::new(e.clone()), *w)).collect(),
            },
            Evidence::OddDegree { degree } => NotSosEvidence::OddDegree(*degree),
            Evidence::NegativeAt { point, value } => NotSosEvidence::NegativeAt {
                point: point.iter().map(|s| rational(s)).collect::<Result<_, _>>()?,
                value: rational(value)?,
            },
        })
    }
}

/// One checkable claim. Polynomials and fields are stored as text so that
/// verification starts from scratch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    Sos {
        nvars: usize,
        poly: String,
        gram: CertificateJson,
    },
    NotSos {
        nvars: usize,
        poly: String,
        evidence: Evidence,
    },
    Lyapunov {
        field: String,
        degree: u32,
        homogeneous: bool,
        v: String,
        margin: String,
        margin_deriv: String,
        deriv_degree: u32,
        exact: bool,
        cert_v: CertificateJson,
        cert_vdot: CertificateJson,
    },
    LyapunovInfeasible {
        field: String,
        degree: u32,
        homogeneous: bool,
        margin: String,
        margin_deriv: String,
        ray: Vec<f64>,
    },
    PowerLyapunov {
        field: String,
        v: String,
        planar: bool,
        k: u32,
        w: String,
        cert_w: CertificateJson,
        cert_wdot: CertificateJson,
    },
    OneInThreeWitness {
        cnf: String,
        assignment: Vec<bool>,
    },
    /// Unsatisfiability, re-checked by enumerating every assignment.
    OneInThreeExhaustive {
        cnf: String,
    },
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("invalid rational `{s}`"))
}

fn poly(text: &str, nvars: usize) -> Result<Polynomial, String> {
    parse_polynomial(text, Some(nvars)).map_err(|e| e.to_string())
}

fn field(text: &str) -> Result<VectorField, String> {
    parse_vector_field(text).map_err(|e| e.to_string())
}

fn sos(json: &CertificateJson) -> Result<SosCertificate, String> {
    SosCertificate::from_json(json).map_err(|e| e.to_string())
}

fn cnf(text: &str) -> Result<CnfInstance, String> {
    parse_cnf(text).map_err(|e| e.to_string())
}

fn check_sos_cert(c: &SosCertificate, p: &Polynomial, tol: f64) -> bool {
    if c.gram.is_rational() {
        c.verify_exact(p)
    } else {
        c.verify_float(p, tol)
    }
}

impl Certificate {
    pub fn sos(p: &Polynomial, c: &SosCertificate) -> Self {
        Certificate::Sos {
            nvars: p.nvars(),
            poly: p.to_string(),
            gram: c.to_json(),
        }
    }

    pub fn not_sos(p: &Polynomial, ev: &NotSosEvidence) -> Self {
        Certificate::NotSos {
            nvars: p.nvars(),
            poly: p.to_string(),
            evidence: Evidence::from_core(ev),
        }
    }

    pub fn lyapunov(problem: &LyapunovProblem, c: &LyapunovCertificate) -> Self {
        Certificate::Lyapunov {
            field: problem.field.to_text(),
            degree: problem.degree,
            homogeneous: problem.homogeneous,
            v: c.v.to_string(),
            margin: format_rational(&c.margin),
            margin_deriv: format_rational(&c.margin_deriv),
            deriv_degree: c.deriv_degree,
            exact: c.exact,
            cert_v: c.cert_v.to_json(),
            cert_vdot: c.cert_vdot.to_json(),
        }
    }

    pub fn infeasible(problem: &LyapunovProblem, c: &InfeasibilityCertificate) -> Self {
        Certificate::LyapunovInfeasible {
            field: problem.field.to_text(),
            degree: problem.degree,
            homogeneous: problem.homogeneous,
            margin: format_rational(&problem.margin),
            margin_deriv: format_rational(&problem.margin_deriv),
            ray: c.ray.clone(),
        }
    }

    /// `None` unless `found` is a `FoundPower`.
    pub fn power(f: &VectorField, v: &Polynomial, planar: bool, found: &PowerSearch) -> Option<Self> {
        let PowerSearch::FoundPower { k, w, cert_w, cert_wdot, .. } = found else {
            return None;
        };
        Some(Certificate::PowerLyapunov {
            field: f.to_text(),
            v: v.to_string(),
            planar,
            k: *k,
            w: w.to_string(),
            cert_w: cert_w.to_json(),
            cert_wdot: cert_wdot.to_json(),
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Sos { .. } => "sos",
            Certificate::NotSos { .. } => "not-sos",
            Certificate::Lyapunov { .. } => "lyapunov",
            Certificate::LyapunovInfeasible { .. } => "lyapunov-infeasible",
            Certificate::PowerLyapunov { .. } => "power-lyapunov",
            Certificate::OneInThreeWitness { .. } => "one-in-three-witness",
            Certificate::OneInThreeExhaustive { .. } => "one-in-three-exhaustive",
        }
    }

    /// Re-checks the claim. Rational certificates are checked exactly,
    /// floating-point ones within `tol`.
    pub fn verify(&self, tol: f64) -> Result<bool, String> {
        Ok(match self {
            Certificate::Sos { nvars, poly: p, gram } => check_sos_cert(&sos(gram)?, &poly(p, *nvars)?, tol),
            Certificate::NotSos { nvars, poly: p, evidence } => evidence.to_core()?.verify(&poly(p, *nvars)?, tol),
            Certificate::Lyapunov {
                field: f,
                degree,
                v,
                margin,
                margin_deriv,
                deriv_degree,
                exact,
                cert_v,
                cert_vdot,
                homogeneous,
            } => {
                let f = field(f)?;
                let v = poly(v, f.nvars())?;
                if *homogeneous && v.homogeneous_degree() != Some(*degree) {
                    return Ok(false);
                }
                if v.degree() > *degree as i64 {
                    return Ok(false);
                }
                let cert = LyapunovCertificate {
                    v,
                    cert_v: sos(cert_v)?,
                    cert_vdot: sos(cert_vdot)?,
                    margin: rational(margin)?,
                    margin_deriv: rational(margin_deriv)?,
                    deriv_degree: *deriv_degree,
                    exact: *exact,
                };
                cert.verify(&f, *degree, tol)
            }
            Certificate::LyapunovInfeasible {
                field: f,
                degree,
                homogeneous,
                margin,
                margin_deriv,
                ray,
            } => {
                let problem = LyapunovProblem::plain(field(f)?, *degree, *homogeneous)
                    .with_margins(rational(margin)?, rational(margin_deriv)?);
                InfeasibilityCertificate { ray: ray.clone() }.verify(&problem, tol)
            }
            Certificate::PowerLyapunov {
                field: f,
                v,
                planar,
                k,
                w,
                cert_w,
                cert_wdot,
            } => {
                let f = field(f)?;
                let n = f.nvars();
                let found = PowerSearch::FoundPower {
                    k: *k,
                    w: poly(w, n)?,
                    cert_w: sos(cert_w)?,
                    cert_wdot: sos(cert_wdot)?,
                    failures: Vec::new(),
                };
                verify_power(&poly(v, n)?, &f, *planar, &found, tol)
            }
            Certificate::OneInThreeWitness { cnf: text, assignment } => {
                let inst = cnf(text)?;
                assignment.len() == inst.nvars() && inst.one_in_three(assignment)
            }
            Certificate::OneInThreeExhaustive { cnf: text } => {
                let inst = cnf(text)?;
                let n = inst.nvars();
                if n > 24 {
                    return Err(format!("{n} variables are too many to enumerate"));
                }
                !(0..1u64 << n).any(|m| {
                    let a: Vec<bool> = (0..n).map(|i| (m >> i) & 1 == 1).collect();
                    inst.one_in_three(&a)
                })
            }
        })
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("certificate serializes")
    }
}

/// Every certificate in a report: values stored under a `certificate` key
/// at any depth, or the document itself if it is a bare certificate.
pub fn collect(doc: &Value) -> Result<Vec<Certificate>, String> {
    if doc.get("kind").is_some() {
        return serde_json::from_value(doc.clone()).map(|c| vec![c]).map_err(|e| e.to_string());
    }
    let mut out = Vec::new();
    walk(doc, &mut out)?;
    Ok(out)
}

fn walk(v: &Value, out: &mut Vec<Certificate>) -> Result<(), String> {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                if k == "certificate" {
                    out.push(serde_json::from_value(child.clone()).map_err(|e| e.to_string())?);
                } else {
                    walk(child, out)?;
                }
            }
        }
        Value::Array(items) => {
            for child in items {
                walk(child, out)?;
            }
        }
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use polylyap::reductions::motzkin;
    use polylyap::sos::{check_sos, square_certificate, BasisMode, SosVerdict};

    #[test]
    fn square_round_trip() {
        let q = parse_polynomial("x1^2 - 3*x1*x2 + 2", Some(2)).unwrap();
        let p = &q * &q;
        let c = Certificate::sos(&p, &square_certificate(&q));
        let back: Certificate = serde_json::from_value(c.to_value()).unwrap();
        assert_eq!(back, c);
        assert!(back.verify(0.0).unwrap());
    }

    #[test]
    fn tampered_polynomial_is_rejected() {
        let q = parse_polynomial("x1 + x2", Some(2)).unwrap();
        let Certificate::Sos { gram, .. } = Certificate::sos(&(&q * &q), &square_certificate(&q)) else {
            unreachable!()
        };
        let bad = Certificate::Sos {
            nvars: 2,
            poly: "x1^2 + x2^2".into(),
            gram,
        };
        assert!(!bad.verify(1e-7).unwrap());
    }

    #[test]
    fn motzkin_evidence_round_trip() {
        let p = motzkin();
        let SosVerdict::NotSos(ev) = check_sos(&p, BasisMode::Newton).unwrap() else { panic!() };
        let c = Certificate::not_sos(&p, &ev);
        let back: Certificate = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert!(back.verify(1e-7).unwrap());
    }

    #[test]
    fn one_in_three_claims() {
        let text = "p cnf 3 1\n1 2 3 0\n";
        let good = Certificate::OneInThreeWitness { cnf: text.into(), assignment: vec![true, false, false] };
        let bad = Certificate::OneInThreeWitness { cnf: text.into(), assignment: vec![true, true, false] };
        assert!(good.verify(0.0).unwrap());
        assert!(!bad.verify(0.0).unwrap());
        let unsat = Certificate::OneInThreeExhaustive { cnf: "p cnf 3 2\n1 2 3 0\n-1 2 3 0\n".into() };
        assert!(unsat.verify(0.0).unwrap());
        assert!(!Certificate::OneInThreeExhaustive { cnf: text.into() }.verify(0.0).unwrap());
    }

    #[test]
    fn collect_finds_nested() {
        let c = Certificate::OneInThreeExhaustive { cnf: "p cnf 3 1\n1 2 3 0\n".into() };
        let doc = serde_json::json!({"results": {"degrees": [{"certificate": c.to_value()}, {"x": 1}]}});
        assert_eq!(collect(&doc).unwrap(), vec![c.clone()]);
        assert_eq!(collect(&c.to_value()).unwrap(), vec![c]);
    }
}
