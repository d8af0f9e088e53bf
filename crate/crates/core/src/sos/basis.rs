//! Monomial bases for Gram parameterizations, including half-Newton-polytope
//! reduction decided by an exact rational LP.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::rational::{int, Rational};
use crate::poly::{Monomial, Polynomial};

/// The vector `z` in `p = zᵀQz`; sorted in graded-lex order, no duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GramBasis {
    monomials: Vec<Monomial>,
}

impl GramBasis {
    pub fn new(mut monomials: Vec<Monomial>) -> Self {
        monomials.sort();
        monomials.dedup();
        GramBasis { monomials }
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn get(&self, i: usize) -> &Monomial {
        &self.monomials[i]
    }

    /// Every monomial `z_i z_j` with `i >= j`, deduplicated and sorted.
    pub fn products(&self) -> Vec<Monomial> {
        let mut out: Vec<Monomial> = Vec::new();
        for (i, a) in self.monomials.iter().enumerate() {
            for b in &self.monomials[..=i] {
                out.push(a.mul(b));
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// The polynomial `zᵢ`.
    pub fn poly(&self, i: usize) -> Polynomial {
        Polynomial::term(self.monomials[i].clone(), Rational::one())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisMode {
    Full,
    Homogeneous,
    Newton,
}

impl BasisMode {
    /// Homogeneous for forms, Newton otherwise.
    pub fn default_for(p: &Polynomial) -> Self {
        if p.is_homogeneous() && !p.is_zero() {
            BasisMode::Homogeneous
        } else {
            BasisMode::Newton
        }
    }
}

pub fn monomial_basis(p: &Polynomial, mode: BasisMode) -> Result<GramBasis> {
    let deg = p.degree();
    if deg < 0 {
        return Ok(GramBasis::new(vec![Monomial::one(p.nvars())]));
    }
    if deg % 2 != 0 {
        return Err(Error::OddDegree(deg));
    }
    let half = (deg / 2) as u32;
    let n = p.nvars();
    match mode {
        BasisMode::Full => Ok(GramBasis::new(Monomial::all_up_to(n, 0, half))),
        BasisMode::Homogeneous => {
            if !p.is_homogeneous() {
                return Err(Error::NotHomogeneous);
            }
            Ok(GramBasis::new(Monomial::all_of_degree(n, half)))
        }
        BasisMode::Newton => {
            let support: Vec<Monomial> = p.support().cloned().collect();
            Ok(newton_basis(n, &support))
        }
    }
}

/// Lattice points `m` with `2m` in the convex hull of `support`.
pub fn newton_basis(nvars: usize, support: &[Monomial]) -> GramBasis {
    if support.is_empty() {
        return GramBasis::new(Vec::new());
    }
    let points: Vec<Vec<i64>> = support
        .iter()
        .map(|m| m.exponents().iter().map(|&e| e as i64).collect())
        .collect();
    let lo: Vec<u32> = (0..nvars)
        .map(|i| support.iter().map(|m| m.exponents()[i]).min().unwrap_or(0))
        .collect();
    let hi: Vec<u32> = (0..nvars)
        .map(|i| support.iter().map(|m| m.exponents()[i]).max().unwrap_or(0))
        .collect();
    let dmin = support.iter().map(|m| m.degree()).min().unwrap_or(0);
    let dmax = support.iter().map(|m| m.degree()).max().unwrap_or(0);
    let candidates = Monomial::all_up_to(nvars, dmin.div_ceil(2), dmax / 2);
    let mut out = Vec::new();
    for m in candidates {
        let e = m.exponents();
        let in_box = (0..nvars).all(|i| 2 * e[i] >= lo[i] && 2 * e[i] <= hi[i]);
        if !in_box {
            continue;
        }
        let doubled = m.pow(2);
        if support.contains(&doubled) {
            out.push(m);
            continue;
        }
        let target: Vec<Rational> = e.iter().map(|&v| int(2 * v as i64)).collect();
        if in_convex_hull(&points, &target) {
            out.push(m);
        }
    }
    GramBasis::new(out)
}

/// Exact test of `target ∈ conv(points)` by phase-1 simplex with Bland's rule.
pub fn in_convex_hull(points: &[Vec<i64>], target: &[Rational]) -> bool {
    let k = points.len();
    if k == 0 {
        return false;
    }
    let n = target.len();
    let rows = n + 1;
    // columns: λ_1..λ_k, artificial a_1..a_rows, rhs
    let cols = k + rows + 1;
    let mut t: Vec<Vec<Rational>> = vec![vec![Rational::zero(); cols]; rows];
    for r in 0..rows {
        let rhs = if r < n { target[r].clone() } else { Rational::one() };
        let sign = if rhs.is_negative() { -Rational::one() } else { Rational::one() };
        for (j, p) in points.iter().enumerate() {
            let v = if r < n { int(p[r]) } else { Rational::one() };
            t[r][j] = &v * &sign;
        }
        t[r][k + r] = Rational::one();
        t[r][cols - 1] = rhs * sign;
    }
    let mut basis: Vec<usize> = (0..rows).map(|r| k + r).collect();
    // objective: minimize Σ a, reduced costs over non-artificial columns
    loop {
        let reduced = |j: usize, t: &Vec<Vec<Rational>>, basis: &Vec<usize>| -> Rational {
            let cj = if j >= k { Rational::one() } else { Rational::zero() };
            let mut z = Rational::zero();
            for (r, &b) in basis.iter().enumerate() {
                if b >= k && !t[r][j].is_zero() {
                    z += &t[r][j];
                }
            }
            cj - z
        };
        let entering = (0..k + rows).find(|&j| !basis.contains(&j) && reduced(j, &t, &basis).is_negative());
        let Some(e) = entering else { break };
        let mut best: Option<(usize, Rational)> = None;
        for r in 0..rows {
            if t[r][e].is_positive() {
                let ratio = &t[r][cols - 1] / &t[r][e];
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && basis[r] < basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
        }
        let Some((pr, _)) = best else { break };
        let pv = t[pr][e].clone();
        for v in t[pr].iter_mut() {
            *v /= &pv;
        }
        let prow = t[pr].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != pr && !row[e].is_zero() {
                let f = row[e].clone();
                for (v, p) in row.iter_mut().zip(&prow) {
                    if !p.is_zero() {
                        *v -= &f * p;
                    }
                }
            }
        }
        basis[pr] = e;
    }
    basis
        .iter()
        .enumerate()
        .all(|(r, &b)| b < k || t[r][cols - 1].is_zero())
}
