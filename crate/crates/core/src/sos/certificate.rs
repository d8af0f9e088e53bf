//! SOS certificates: a basis, a Gram matrix and optionally explicit squares.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::basis::GramBasis;
use crate::error::{Error, Result};
use crate::linalg::eig::eig_min;
use crate::linalg::exact::psd_check_exact;
use crate::linalg::sym::SymMatrix;
use crate::poly::rational::{format_rational, from_f64_exact, parse_rational, Rational};
use crate::poly::{parse_polynomial, Polynomial};

#[derive(Debug, Clone, PartialEq)]
pub enum GramMatrix {
    Float(SymMatrix<f64>),
    Rational(SymMatrix<Rational>),
}

impl GramMatrix {
    pub fn is_rational(&self) -> bool {
        matches!(self, GramMatrix::Rational(_))
    }

    pub fn dim(&self) -> usize {
        match self {
            GramMatrix::Float(m) => m.dim(),
            GramMatrix::Rational(m) => m.dim(),
        }
    }

    pub fn to_f64(&self) -> SymMatrix<f64> {
        match self {
            GramMatrix::Float(m) => m.clone(),
            GramMatrix::Rational(m) => m.map(crate::poly::rational::to_f64),
        }
    }

    /// Exact rational copy (floats convert without rounding).
    pub fn to_rational(&self) -> SymMatrix<Rational> {
        match self {
            GramMatrix::Float(m) => m.map(|v| from_f64_exact(*v).unwrap_or_else(Rational::zero)),
            GramMatrix::Rational(m) => m.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SosCertificate {
    pub basis: GramBasis,
    pub gram: GramMatrix,
    pub squares: Option<Vec<Polynomial>>,
}

/// `zᵀQz` evaluated exactly.
pub fn gram_polynomial(basis: &GramBasis, q: &SymMatrix<Rational>, nvars: usize) -> Polynomial {
    let mut terms = Vec::new();
    for i in 0..basis.len() {
        for j in 0..=i {
            let v = q.get(i, j);
            if v.is_zero() {
                continue;
            }
            let c = if i == j { v.clone() } else { v + v };
            terms.push((basis.get(i).mul(basis.get(j)), c));
        }
    }
    Polynomial::from_terms(nvars, terms).expect("basis monomials share the variable count")
}

impl SosCertificate {
    pub fn polynomial(&self, nvars: usize) -> Polynomial {
        gram_polynomial(&self.basis, &self.gram.to_rational(), nvars)
    }

    /// Exact verification for rational certificates: `zᵀQz == p`, `Q ⪰ 0`
    /// and, when squares are present, `Σ qᵢ² == p`.
    pub fn verify_exact(&self, p: &Polynomial) -> bool {
        let GramMatrix::Rational(q) = &self.gram else {
            return false;
        };
        if q.dim() != self.basis.len() {
            return false;
        }
        if gram_polynomial(&self.basis, q, p.nvars()) != *p || !psd_check_exact(q).is_psd() {
            return false;
        }
        match &self.squares {
            None => true,
            Some(sq) => sum_of_squares(sq, p.nvars()) == *p,
        }
    }

    /// Floating verification: coefficient residual of `zᵀQz - p` at most
    /// `tol·(1 + ‖p‖∞)` and `eig_min(Q) ≥ -tol·max(1, ‖Q‖max)`.
    pub fn verify_float(&self, p: &Polynomial, tol: f64) -> bool {
        if self.gram.dim() != self.basis.len() {
            return false;
        }
        let scale = 1.0 + crate::poly::rational::to_f64(&p.max_abs_coeff());
        let q = self.gram.to_f64();
        let resid = self.polynomial(p.nvars()).max_abs_diff(p);
        resid <= tol * scale && eig_min(&q) >= -tol * q.max_abs().max(1.0)
    }

    pub fn to_json(&self) -> CertificateJson {
        let (kind, gram) = match &self.gram {
            GramMatrix::Float(m) => (
                "float",
                m.rows().iter().map(|r| r.iter().map(|v| format!("{v}")).collect()).collect(),
            ),
            GramMatrix::Rational(m) => (
                "rational",
                m.rows().iter().map(|r| r.iter().map(format_rational).collect()).collect(),
            ),
        };
        CertificateJson {
            kind: kind.to_string(),
            basis: self.basis.monomials().iter().map(|m| m.exponents().to_vec()).collect(),
            gram,
            squares: self.squares.as_ref().map(|s| s.iter().map(|q| q.to_text()).collect()),
        }
    }

    pub fn from_json(json: &CertificateJson) -> Result<Self> {
        let nvars = json.basis.first().map(|m| m.len()).unwrap_or(0);
        if json.basis.iter().any(|m| m.len() != nvars) {
            return Err(Error::Invalid("basis monomials disagree on the variable count".into()));
        }
        let basis = GramBasis::new(json.basis.iter().map(|e| crate::Monomial::new(e.clone())).collect());
        if basis.len() != json.basis.len() || json.gram.len() != basis.len() {
            return Err(Error::Invalid("Gram size does not match the basis".into()));
        }
        let ordered = basis.monomials().iter().zip(&json.basis).all(|(a, b)| a.exponents() == b.as_slice());
        if !ordered {
            return Err(Error::Invalid("basis must be listed in graded-lex order without repeats".into()));
        }
        let gram = match json.kind.as_str() {
            "float" => {
                let rows: Option<Vec<Vec<f64>>> =
                    json.gram.iter().map(|r| r.iter().map(|s| s.parse::<f64>().ok()).collect()).collect();
                let rows = rows.ok_or_else(|| Error::Invalid("bad float Gram entry".into()))?;
                GramMatrix::Float(
                    SymMatrix::from_rows(&rows).ok_or_else(|| Error::Invalid("Gram is not symmetric".into()))?,
                )
            }
            "rational" => {
                let rows: Option<Vec<Vec<Rational>>> =
                    json.gram.iter().map(|r| r.iter().map(|s| parse_rational(s)).collect()).collect();
                let rows = rows.ok_or_else(|| Error::Invalid("bad rational Gram entry".into()))?;
                GramMatrix::Rational(
                    SymMatrix::from_rows(&rows).ok_or_else(|| Error::Invalid("Gram is not symmetric".into()))?,
                )
            }
            other => return Err(Error::Invalid(format!("unknown Gram kind `{other}`"))),
        };
        let squares = match &json.squares {
            None => None,
            Some(list) => Some(
                list.iter()
                    .map(|s| parse_polynomial(s, Some(nvars)))
                    .collect::<std::result::Result<Vec<_>, _>>()?,
            ),
        };
        Ok(SosCertificate { basis, gram, squares })
    }
}

pub fn sum_of_squares(squares: &[Polynomial], nvars: usize) -> Polynomial {
    let mut acc = Polynomial::zero(nvars);
    for q in squares {
        acc = acc + q * q;
    }
    acc
}

/// On-disk form: basis as exponent vectors, Gram entries as decimal strings
/// (`float`) or `num/den` strings (`rational`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub kind: String,
    pub basis: Vec<Vec<u32>>,
    pub gram: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squares: Option<Vec<String>>,
}

/// Rational certificate for a polynomial that is an explicit square `q²`.
pub fn square_certificate(q: &Polynomial) -> SosCertificate {
    let basis = GramBasis::new(q.support().cloned().collect());
    let coeffs: Vec<Rational> = basis.monomials().iter().map(|m| q.coeff(m)).collect();
    let gram = SymMatrix::from_fn(basis.len(), |i, j| &coeffs[i] * &coeffs[j]);
    SosCertificate {
        basis,
        gram: GramMatrix::Rational(gram),
        squares: Some(vec![q.clone()]),
    }
}

impl SosCertificate {
    /// Certificate of the zero polynomial over a one-element basis.
    pub fn zero(nvars: usize) -> Self {
        SosCertificate {
            basis: GramBasis::new(vec![crate::Monomial::one(nvars)]),
            gram: GramMatrix::Rational(SymMatrix::filled(1, Rational::zero())),
            squares: Some(Vec::new()),
        }
    }

    pub fn constant(nvars: usize, c: &Rational) -> Self {
        SosCertificate {
            basis: GramBasis::new(vec![crate::Monomial::one(nvars)]),
            gram: GramMatrix::Rational(SymMatrix::filled(1, c.clone())),
            squares: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational::int;

    #[test]
    fn square_certificate_verifies() {
        let q = parse_polynomial("x1 - x2", Some(2)).unwrap();
        let cert = square_certificate(&q);
        assert!(cert.verify_exact(&(&q * &q)));
        assert!(!cert.verify_exact(&(&q * &q + Polynomial::one(2))));
    }

    #[test]
    fn json_round_trip() {
        let q = parse_polynomial("x1^2 - 1/3*x2^2", Some(2)).unwrap();
        let cert = square_certificate(&q);
        let json = cert.to_json();
        assert_eq!(json.kind, "rational");
        let text = serde_json::to_string(&json).unwrap();
        let back: CertificateJson = serde_json::from_str(&text).unwrap();
        assert_eq!(SosCertificate::from_json(&back).unwrap(), cert);
    }

    #[test]
    fn float_json_round_trip() {
        let cert = SosCertificate {
            basis: GramBasis::new(vec![crate::Monomial::var(1, 0)]),
            gram: GramMatrix::Float(SymMatrix::filled(1, 0.1)),
            squares: None,
        };
        let back = SosCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
        let p = Polynomial::term(crate::Monomial::new(vec![2]), int(1) / int(10));
        assert!(back.verify_float(&p, 1e-12));
    }

    #[test]
    fn rejects_indefinite_gram() {
        let basis = GramBasis::new(vec![crate::Monomial::new(vec![0, 1]), crate::Monomial::new(vec![1, 0])]);
        let gram = SymMatrix::from_rows(&[vec![int(1), int(2)], vec![int(2), int(1)]]).unwrap();
        let cert = SosCertificate { basis, gram: GramMatrix::Rational(gram.clone()), squares: None };
        let p = gram_polynomial(&cert.basis, &gram, 2);
        assert!(!cert.verify_exact(&p));
    }
}
