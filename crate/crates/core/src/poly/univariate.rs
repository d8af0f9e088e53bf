//! Exact univariate polynomials, used to decide sign conditions of binary forms.

use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::polynomial::Polynomial;
use super::rational::{int, Rational};
use crate::error::{check_dim, Error, Result};

/// Dense univariate polynomial, coefficients from the constant term upward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly(Vec<Rational>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.0.len() as i64 - 1
    }

    pub fn leading(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    fn sub(&self, other: &UniPoly) -> UniPoly {
        let n = self.0.len().max(other.0.len());
        UniPoly::new(
            (0..n)
                .map(|i| {
                    let a = self.0.get(i).cloned().unwrap_or_else(Rational::zero);
                    let b = other.0.get(i).cloned().unwrap_or_else(Rational::zero);
                    a - b
                })
                .collect(),
        )
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.0.clone();
        let dd = d.0.len() - 1;
        let lc = d.leading();
        if r.len() <= dd {
            return (UniPoly::new(vec![]), UniPoly::new(r));
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lc;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    r[k + j] -= &c * dj;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (UniPoly::new(q), UniPoly::new(r))
    }

    fn monic(&self) -> UniPoly {
        let lc = self.leading();
        UniPoly(self.0.iter().map(|c| c / &lc).collect())
    }

    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = std::mem::replace(&mut b, r);
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Number of distinct real roots, by Sturm's theorem.
    pub fn count_real_roots(&self) -> usize {
        if self.degree() <= 0 {
            return 0;
        }
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(UniPoly::new(r.0.iter().map(|c| -c).collect()));
        }
        let changes = |signs: Vec<i8>| {
            let nz: Vec<i8> = signs.into_iter().filter(|&s| s != 0).collect();
            nz.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let sign = |c: &Rational| if c.is_positive() { 1 } else if c.is_negative() { -1 } else { 0 };
        let at_pos = seq.iter().map(|p| sign(&p.leading())).collect();
        let at_neg = seq
            .iter()
            .map(|p| {
                let s = sign(&p.leading());
                if p.degree() % 2 == 1 {
                    -s
                } else {
                    s
                }
            })
            .collect();
        changes(at_neg) - changes(at_pos)
    }

    /// Square-free factors `a_1, a_2, ...` with `self = c * Π a_i^i` (Yun).
    pub fn squarefree_factors(&self) -> Vec<UniPoly> {
        let one = UniPoly::new(vec![Rational::one()]);
        if self.degree() <= 0 {
            return vec![];
        }
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.div_rem(&a0).0;
        let c = d.div_rem(&a0).0;
        let mut dd = c.sub(&b.derivative());
        let mut out = Vec::new();
        while b.degree() > 0 {
            let a = b.gcd(&dd);
            let nb = b.div_rem(&a).0;
            let nc = dd.div_rem(&a).0;
            dd = nc.sub(&nb.derivative());
            b = nb;
            out.push(if a.is_zero() { one.clone() } else { a });
        }
        out
    }

    /// `p(t) >= 0` for every real `t`.
    pub fn is_nonnegative(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        if self.leading().is_negative() || self.degree() % 2 == 1 {
            return false;
        }
        // every real root must have even multiplicity
        self.squarefree_factors()
            .iter()
            .enumerate()
            .filter(|(i, _)| (i + 1) % 2 == 1)
            .all(|(_, a)| a.count_real_roots() == 0)
    }

    /// `p(t) > 0` for every real `t`.
    pub fn is_positive(&self) -> bool {
        !self.is_zero()
            && self.leading().is_positive()
            && self.degree() % 2 == 0
            && self.count_real_roots() == 0
    }
}

fn dehomogenized_binary(p: &Polynomial) -> Result<(UniPoly, Rational)> {
    check_dim(2, p.nvars())?;
    let d = p.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
    let mut coeffs = vec![Rational::zero(); d as usize + 1];
    for (m, c) in p.terms() {
        coeffs[m.exponents()[1] as usize] = c.clone();
    }
    let at_infinity = p.coeff(&Monomial::new(vec![0, d]));
    Ok((UniPoly::new(coeffs), at_infinity))
}

/// Exact nonnegativity test for a binary form via `p(1, t)` and `p(0, 1)`.
pub fn binary_form_nonnegative(p: &Polynomial) -> Result<bool> {
    let (q, inf) = dehomogenized_binary(p)?;
    Ok(q.is_nonnegative() && !inf.is_negative())
}

/// Exact positive-definiteness test for a binary form.
pub fn binary_form_positive_definite(p: &Polynomial) -> Result<bool> {
    if p.is_zero() {
        return Ok(false);
    }
    let (q, inf) = dehomogenized_binary(p)?;
    Ok(q.is_positive() && inf.is_positive())
}
