use std::fmt;

use num_traits::Zero;

use super::monomial::Monomial;
use super::polynomial::Polynomial;
use super::rational::{int, Rational};
use crate::error::{check_dim, Error, Result};

/// Polynomial vector field `x' = f(x)` on `R^n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VectorField {
    components: Vec<Polynomial>,
}

impl VectorField {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Invalid("vector field needs at least one component".into()));
        }
        let n = components.len();
        for c in &components {
            check_dim(n, c.nvars())?;
        }
        Ok(VectorField { components })
    }

    /// Like [`VectorField::new`] but additionally requires every component to be
    /// homogeneous of one common degree.
    pub fn new_homogeneous(components: Vec<Polynomial>) -> Result<Self> {
        let f = Self::new(components)?;
        f.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
        Ok(f)
    }

    pub fn nvars(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    pub fn degree(&self) -> i64 {
        self.components.iter().map(Polynomial::degree).max().unwrap_or(-1)
    }

    /// Common degree when every nonzero component is homogeneous of the same degree.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut deg = None;
        for c in self.components.iter().filter(|c| !c.is_zero()) {
            let d = c.homogeneous_degree()?;
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        Some(deg.unwrap_or(0))
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous_degree().is_some()
    }

    pub fn vanishes_at_origin(&self) -> bool {
        let one = Monomial::one(self.nvars());
        self.components.iter().all(|c| c.coeff(&one).is_zero())
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Vec<Rational>> {
        self.components.iter().map(|c| c.evaluate(point)).collect()
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|c| c.evaluate_f64(point)).collect()
    }

    pub fn scale(&self, c: &Rational) -> VectorField {
        VectorField {
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        check_dim(self.nvars(), other.nvars())?;
        Ok(VectorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Jacobian at the origin, read off the linear terms exactly.
    pub fn linearization(&self) -> Vec<Vec<Rational>> {
        let n = self.nvars();
        self.components
            .iter()
            .map(|c| (0..n).map(|j| c.coeff(&Monomial::var(n, j))).collect())
            .collect()
    }

    /// `-grad V` for a scalar function `V`.
    pub fn negative_gradient(v: &Polynomial) -> Result<VectorField> {
        VectorField::new(v.gradient().into_iter().map(|g| -g).collect())
    }

    /// `x' = A x` for a rational matrix.
    pub fn linear(a: &[Vec<Rational>]) -> Result<VectorField> {
        let n = a.len();
        let comps = a
            .iter()
            .map(|row| {
                check_dim(n, row.len())?;
                Polynomial::from_terms(
                    n,
                    row.iter()
                        .enumerate()
                        .map(|(j, c)| (Monomial::var(n, j), c.clone())),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(comps)
    }

    /// Text form, one `dxi = ...` line per component.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, c) in self.components.iter().enumerate() {
            s.push_str(&format!("dx{} = {}\n", i + 1, c));
        }
        s
    }
}

/// `<grad V, f>`, the derivative of `V` along trajectories of `f`.
pub fn lie_derivative(v: &Polynomial, f: &VectorField) -> Result<Polynomial> {
    check_dim(f.nvars(), v.nvars())?;
    let mut acc = Polynomial::zero(v.nvars());
    for (i, fi) in f.components().iter().enumerate() {
        let d = v.partial(i);
        if !d.is_zero() && !fi.is_zero() {
            acc = acc + &d * fi;
        }
    }
    Ok(acc)
}

/// `-‖x‖^2`-style helper: `Σ x_i^k`.
pub fn power_sum(nvars: usize, k: u32) -> Polynomial {
    let mut p = Polynomial::zero(nvars);
    for i in 0..nvars {
        let mut e = vec![0; nvars];
        e[i] = k;
        p.add_term(Monomial::new(e), int(1));
    }
    p
}

/// `‖x‖^2 = Σ x_i^2`.
pub fn norm_squared(nvars: usize) -> Polynomial {
    power_sum(nvars, 2)
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorField[{}]{{ {} }}", self.nvars(), self.to_text().trim_end().replace('\n', "; "))
    }
}
