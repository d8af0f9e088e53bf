use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::rational::{format_rational, int, to_f64, Rational};
use crate::error::{check_dim, Error, Result};

/// Exact multivariate polynomial with rational coefficients.
///
/// Terms are kept in graded-lex order and zero coefficients are never stored,
/// so two polynomials are equal iff their term maps are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The coordinate function `x_i` (0-based index).
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::term(Monomial::var(nvars, i), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { nvars, terms }
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(nvars: usize, it: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in it {
            check_dim(nvars, m.nvars())?;
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, or `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .next_back()
            .map(|m| m.degree() as i64)
            .unwrap_or(-1)
    }

    pub fn min_degree(&self) -> i64 {
        self.terms
            .keys()
            .next()
            .map(|m| m.degree() as i64)
            .unwrap_or(-1)
    }

    /// Common degree of all terms, if there is one. The zero polynomial is
    /// homogeneous of every degree and reports `Some(0)`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Monomial::degree);
        match it.next() {
            None => Some(0),
            Some(d) => it.all(|e| e == d).then_some(d),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous_degree().is_some()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn max_abs_coeff(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn arithmetic(&self, other: &Polynomial, op: ArithOp) -> Result<Polynomial> {
        check_dim(self.nvars, other.nvars)?;
        Ok(match op {
            ArithOp::Add => self + other,
            ArithOp::Sub => self - other,
            ArithOp::Mul => self * other,
        })
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut result = Polynomial::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Composition `p(map_1(y), ..., map_n(y))`.
    pub fn substitute(&self, map: &[Polynomial]) -> Result<Polynomial> {
        check_dim(self.nvars, map.len())?;
        let target = map.first().map(Polynomial::nvars).unwrap_or(0);
        for q in map {
            check_dim(target, q.nvars)?;
        }
        // cache powers of each substituted component
        let mut powers: Vec<Vec<Polynomial>> = vec![vec![Polynomial::one(target)]; self.nvars];
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &map[i];
                    powers[i].push(next);
                }
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            out = out + t;
        }
        Ok(out)
    }

    pub fn partial(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponents()[i];
            if e == 0 {
                continue;
            }
            let mut ex = m.exponents().to_vec();
            ex[i] -= 1;
            out.add_term(Monomial::new(ex), c * int(e as i64));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    /// `y^target_degree * p(x / y)` as a polynomial in `nvars + 1` variables,
    /// with `y` appended as the last variable.
    pub fn homogenize(&self, target_degree: u32) -> Result<Polynomial> {
        if (target_degree as i64) < self.degree() {
            return Err(Error::DegreeTooLow {
                target: target_degree,
                degree: self.degree(),
            });
        }
        let mut out = Polynomial::zero(self.nvars + 1);
        for (m, c) in &self.terms {
            let mut ex = m.exponents().to_vec();
            ex.push(target_degree - m.degree());
            out.add_term(Monomial::new(ex), c.clone());
        }
        Ok(out)
    }

    /// Sets the last variable to one and drops it.
    pub fn dehomogenize(&self) -> Result<Polynomial> {
        if self.nvars == 0 {
            return Err(Error::Invalid("cannot dehomogenize a polynomial in zero variables".into()));
        }
        let mut out = Polynomial::zero(self.nvars - 1);
        for (m, c) in &self.terms {
            let ex = m.exponents()[..self.nvars - 1].to_vec();
            out.add_term(Monomial::new(ex), c.clone());
        }
        Ok(out)
    }

    /// Sets variable `i` to zero, keeping the variable count.
    pub fn restrict_zero(&self, i: usize) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exponents()[i] == 0)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// The sum of all terms of total degree `d`.
    pub fn homogeneous_component(&self, d: u32) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        check_dim(self.nvars, point.len())?;
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (&e, x) in m.exponents().iter().zip(point) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> Result<f64> {
        check_dim(self.nvars, point.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| to_f64(c) * m.eval_f64(point))
            .sum())
    }

    /// `W(x,y) + W(y,-x) + W(-x,-y) + W(-y,x)` for a bivariate `W`.
    pub fn symmetrize_quarter_turn(&self) -> Result<Polynomial> {
        check_dim(2, self.nvars)?;
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let maps = [
            [x.clone(), y.clone()],
            [y.clone(), -&x],
            [-&x, -&y],
            [-&y, x.clone()],
        ];
        let mut out = Polynomial::zero(2);
        for m in &maps {
            out = out + self.substitute(m)?;
        }
        Ok(out)
    }

    /// `x . grad V - d V` for a form of degree `d`; identically zero.
    pub fn euler_residual(&self) -> Result<Polynomial> {
        let d = self.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
        let mut acc = Polynomial::zero(self.nvars);
        for (i, g) in self.gradient().iter().enumerate() {
            acc = acc + &Polynomial::var(self.nvars, i) * g;
        }
        Ok(acc - self.scale(&int(d as i64)))
    }

    pub fn map_coeffs<F: Fn(&Rational) -> Rational>(&self, f: F) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Largest coefficient magnitude of `self - other` as a float.
    pub fn max_abs_diff(&self, other: &Polynomial) -> f64 {
        to_f64(&(self - other).max_abs_coeff())
    }

    /// Text form parseable by [`crate::poly::parse_polynomial`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                f.write_str(&format_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", format_rational(&a), m)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.nvars, self)
    }
}

fn assert_same_dim(a: &Polynomial, b: &Polynomial) {
    assert_eq!(
        a.nvars, b.nvars,
        "polynomial dimension mismatch; use Polynomial::arithmetic for a checked variant"
    );
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_same_dim(self, rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        assert_same_dim(&self, &rhs);
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Sub<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_same_dim(self, rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(mut self, rhs: Polynomial) -> Polynomial {
        assert_same_dim(&self, &rhs);
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
        self
    }
}

impl Mul<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_same_dim(self, rhs);
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational::rat;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn c(n: usize, v: i64) -> Polynomial {
        Polynomial::constant(n, int(v))
    }

    pub(crate) fn motzkin() -> Polynomial {
        let (a, b) = (x(2, 0), x(2, 1));
        a.pow(4) * b.pow(2) + a.pow(2) * b.pow(4) - c(2, 3) * a.pow(2) * b.pow(2) + c(2, 1)
    }

    #[test]
    fn difference_of_squares() {
        let (a, b) = (x(2, 0), x(2, 1));
        let p = (&a + &b) * (&a - &b);
        assert_eq!(p, a.pow(2) - b.pow(2));
    }

    #[test]
    fn cancellation_gives_zero() {
        let a = x(1, 0).pow(2);
        let z = a.arithmetic(&-&a, ArithOp::Add).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.degree(), -1);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = x(2, 0).arithmetic(&x(3, 0), ArithOp::Mul).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn motzkin_squared_by_convolution() {
        let m = motzkin();
        let sq = &m * &m;
        // independent convolution over the raw term lists
        let mut oracle: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        let terms: Vec<_> = m.terms().collect();
        for (ma, ca) in &terms {
            for (mb, cb) in &terms {
                let e: Vec<u32> = ma.exponents().iter().zip(mb.exponents()).map(|(p, q)| p + q).collect();
                *oracle.entry(e).or_insert_with(Rational::zero) += *ca * *cb;
            }
        }
        oracle.retain(|_, v| !v.is_zero());
        let got: BTreeMap<Vec<u32>, Rational> =
            sq.terms().map(|(m, c)| (m.exponents().to_vec(), c.clone())).collect();
        assert_eq!(got, oracle);
        assert_eq!(sq.degree(), 12);
        assert_eq!(sq.evaluate(&[int(1), int(1)]).unwrap(), int(0));
    }

    #[test]
    fn motzkin_values() {
        let m = motzkin();
        assert_eq!(m.evaluate(&[int(1), int(1)]).unwrap(), int(0));
        let shifted = m.substitute(&[&x(2, 0) - &c(2, 1), &x(2, 1) - &c(2, 1)]).unwrap();
        assert_eq!(shifted.evaluate(&[int(1), int(1)]).unwrap(), int(1));
        let id = m.substitute(&[x(2, 0), x(2, 1)]).unwrap();
        assert_eq!(id, m);
    }

    #[test]
    fn reznick_homogenization() {
        // x1^2 + (1 - x1 x2)^2 and its degree-4 homogenization
        let p = x(2, 0).pow(2) + (c(2, 1) - x(2, 0) * x(2, 1)).pow(2);
        let h = p.homogenize(4).unwrap();
        let (a, b, y) = (x(3, 0), x(3, 1), x(3, 2));
        let expected = a.pow(2) * y.pow(2) + (y.pow(2) - a.clone() * b.clone()).pow(2);
        assert_eq!(h, expected);
        assert_eq!(h.evaluate(&[int(1), int(0), int(0)]).unwrap(), int(0));
        assert_eq!(h.evaluate(&[int(0), int(1), int(0)]).unwrap(), int(0));
        // y^4 p(x/y) evaluated pointwise with exact division
        for (u, v, w) in [(1, 2, 3), (-2, 5, 7), (3, -1, -2)] {
            let (u, v, w) = (int(u), int(v), int(w));
            let direct = p.evaluate(&[&u / &w, &v / &w]).unwrap() * num_traits::pow(w.clone(), 4);
            assert_eq!(h.evaluate(&[u, v, w]).unwrap(), direct);
        }
        assert_eq!(h.dehomogenize().unwrap(), p);
    }

    #[test]
    fn homogenize_rejects_low_degree() {
        assert!(matches!(
            motzkin().homogenize(5),
            Err(Error::DegreeTooLow { target: 5, degree: 6 })
        ));
    }

    #[test]
    fn gradients() {
        let v = x(2, 0).pow(4) + x(2, 1).pow(4);
        let g = v.gradient();
        assert_eq!(g[0], x(2, 0).pow(3).scale(&int(4)));
        assert_eq!(g[1], x(2, 1).pow(3).scale(&int(4)));
        let q = (x(2, 0).pow(2) + x(2, 1).pow(2)).scale(&rat(1, 2));
        assert_eq!(q.gradient(), vec![x(2, 0), x(2, 1)]);
        assert!(c(2, 7).gradient().iter().all(Polynomial::is_zero));
    }

    #[test]
    fn quarter_turn_symmetrization() {
        let w = x(2, 0).pow(6);
        assert_eq!(
            w.symmetrize_quarter_turn().unwrap(),
            (x(2, 0).pow(6) + x(2, 1).pow(6)).scale(&int(2))
        );
        let v = x(2, 0).pow(4) + x(2, 1).pow(4);
        assert_eq!(v.symmetrize_quarter_turn().unwrap(), v.scale(&int(4)));
        assert!(x(3, 0).symmetrize_quarter_turn().is_err());
    }

    #[test]
    fn euler_identity_examples() {
        let v = x(2, 0).pow(4) + x(2, 1).pow(4);
        assert!(v.euler_residual().unwrap().is_zero());
        assert!((x(2, 0).pow(2) * x(2, 1).pow(2)).euler_residual().unwrap().is_zero());
        assert!(matches!(motzkin().euler_residual(), Err(Error::NotHomogeneous)));
    }

    #[test]
    fn display_is_descending_graded_lex() {
        let p = motzkin();
        assert_eq!(p.to_string(), "x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2 + 1");
        let q = x(2, 0).scale(&rat(-3, 4)) + c(2, 2);
        assert_eq!(q.to_string(), "-3/4*x1 + 2");
    }
}
