//! Exact rational linear algebra: symmetric-pivoted LDLᵀ and dense solves.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::sym::SymMatrix;
use crate::error::{check_dim, Result};
use crate::poly::rational::{int, Rational};

/// Outcome of an exact semidefiniteness test.
#[derive(Debug, Clone, PartialEq)]
pub enum PsdVerdict {
    /// All `n` pivots positive.
    PositiveDefinite { pivots: Vec<Rational> },
    /// Nonnegative pivots, at least one zero.
    PositiveSemidefinite { pivots: Vec<Rational> },
    /// `witnessᵀ M witness = value < 0`.
    NotPsd { witness: Vec<Rational>, value: Rational },
}

impl PsdVerdict {
    pub fn is_psd(&self) -> bool {
        !matches!(self, PsdVerdict::NotPsd { .. })
    }

    pub fn is_pd(&self) -> bool {
        matches!(self, PsdVerdict::PositiveDefinite { .. })
    }
}

struct Step {
    pivot: usize,
    d: Rational,
    // (index, entry) of the pivot row over the indices still active afterwards
    row: Vec<(usize, Rational)>,
}

pub fn quadratic_form(m: &SymMatrix<Rational>, v: &[Rational]) -> Rational {
    let n = m.dim();
    let mut acc = Rational::zero();
    for i in 0..n {
        if v[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if !v[j].is_zero() {
                acc += &v[i] * m.get(i, j) * &v[j];
            }
        }
    }
    acc
}

/// LDLᵀ with symmetric pivoting in exact arithmetic.
///
/// Pivots are taken as the first positive remaining diagonal entry, so a
/// positive definite input is factored in natural order and the pivots are
/// ratios of consecutive leading principal minors.
pub fn psd_check_exact(m: &SymMatrix<Rational>) -> PsdVerdict {
    let n = m.dim();
    let mut a = m.rows();
    let mut active: Vec<usize> = (0..n).collect();
    let mut steps: Vec<Step> = Vec::new();

    let reduced_witness: Option<Vec<(usize, Rational)>> = loop {
        if active.is_empty() {
            break None;
        }
        if let Some(&i) = active.iter().find(|&&i| a[i][i].is_negative()) {
            break Some(vec![(i, Rational::one())]);
        }
        match active.iter().copied().find(|&i| a[i][i].is_positive()) {
            Some(k) => {
                let d = a[k][k].clone();
                active.retain(|&i| i != k);
                let row: Vec<(usize, Rational)> =
                    active.iter().map(|&j| (j, a[k][j].clone())).collect();
                for &(i, ref bi) in &row {
                    if bi.is_zero() {
                        continue;
                    }
                    let f = bi / &d;
                    for &(j, ref bj) in &row {
                        if !bj.is_zero() {
                            a[i][j] -= &f * bj;
                        }
                    }
                }
                steps.push(Step { pivot: k, d, row });
            }
            None => {
                // zero diagonal: any nonzero off-diagonal entry makes it indefinite
                let mut found = None;
                'outer: for (x, &i) in active.iter().enumerate() {
                    for &j in &active[x + 1..] {
                        if !a[i][j].is_zero() {
                            found = Some((i, j));
                            break 'outer;
                        }
                    }
                }
                match found {
                    Some((i, j)) => {
                        let t = if a[i][j].is_positive() { -Rational::one() } else { Rational::one() };
                        break Some(vec![(i, Rational::one()), (j, t)]);
                    }
                    None => break None,
                }
            }
        }
    };

    match reduced_witness {
        None => {
            let mut pivots: Vec<Rational> = steps.iter().map(|s| s.d.clone()).collect();
            let zeros = n - pivots.len();
            pivots.extend(std::iter::repeat_n(Rational::zero(), zeros));
            if zeros == 0 {
                PsdVerdict::PositiveDefinite { pivots }
            } else {
                PsdVerdict::PositiveSemidefinite { pivots }
            }
        }
        Some(w) => {
            if let Some(short) = short_witness(m) {
                return short;
            }
            let mut v = vec![Rational::zero(); n];
            for (i, c) in w {
                v[i] = c;
            }
            for s in steps.iter().rev() {
                let dot: Rational = s.row.iter().map(|(j, b)| b * &v[*j]).sum();
                v[s.pivot] = -dot / &s.d;
            }
            let value = quadratic_form(m, &v);
            debug_assert!(value.is_negative());
            PsdVerdict::NotPsd { witness: v, value }
        }
    }
}

// e_i or e_i ∓ e_j when one of them already exposes indefiniteness
fn short_witness(m: &SymMatrix<Rational>) -> Option<PsdVerdict> {
    let n = m.dim();
    for i in 0..n {
        if m.get(i, i).is_negative() {
            let mut witness = vec![Rational::zero(); n];
            witness[i] = Rational::one();
            return Some(PsdVerdict::NotPsd { witness, value: m.get(i, i).clone() });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let off = m.get(i, j);
            let value = m.get(i, i) + m.get(j, j) - off.abs() * int(2);
            if value.is_negative() {
                let mut witness = vec![Rational::zero(); n];
                witness[i] = Rational::one();
                witness[j] = if off.is_positive() { -Rational::one() } else { Rational::one() };
                return Some(PsdVerdict::NotPsd { witness, value });
            }
        }
    }
    None
}

/// Unique solution of a square rational system, or `None` when singular.
pub fn solve_exact(a: &[Vec<Rational>], b: &[Rational]) -> Result<Option<Vec<Rational>>> {
    let n = a.len();
    check_dim(n, b.len())?;
    for row in a {
        check_dim(n, row.len())?;
    }
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Ok(None);
        };
        m.swap(col, p);
        let inv = Rational::one() / &m[col][col];
        for k in col..=n {
            m[col][k] *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for k in col..=n {
                    let delta = &f * &m[col][k];
                    m[r][k] -= delta;
                }
            }
        }
    }
    Ok(Some(m.into_iter().map(|r| r[n].clone()).collect()))
}

/// Answer of the exact Lyapunov-equation test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LyapunovAnswer {
    /// `AᵀP + PA = -I` with `P` positive definite; `P` given row-major.
    Yes(Vec<Vec<String>>),
    No(String),
}

/// Solves `AᵀP + PA = -I` for symmetric `P` exactly and tests `P ≻ 0`.
pub fn lyapunov_equation(a: &[Vec<Rational>]) -> Result<(LyapunovAnswer, Option<SymMatrix<Rational>>)> {
    let n = a.len();
    for row in a {
        check_dim(n, row.len())?;
    }
    let idx = |i: usize, j: usize| {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        r * (r + 1) / 2 + c
    };
    let unknowns = n * (n + 1) / 2;
    let mut sys = vec![vec![Rational::zero(); unknowns]; unknowns];
    let mut rhs = vec![Rational::zero(); unknowns];
    for k in 0..n {
        for l in 0..=k {
            let row = idx(k, l);
            // (AᵀP)_{kl} = Σ_m A_{mk} P_{ml};  (PA)_{kl} = Σ_m P_{km} A_{ml}
            for mm in 0..n {
                if !a[mm][k].is_zero() {
                    sys[row][idx(mm, l)] += &a[mm][k];
                }
                if !a[mm][l].is_zero() {
                    sys[row][idx(k, mm)] += &a[mm][l];
                }
            }
            if k == l {
                rhs[row] = int(-1);
            }
        }
    }
    let Some(sol) = solve_exact(&sys, &rhs)? else {
        return Ok((LyapunovAnswer::No("no solution".into()), None));
    };
    let p = SymMatrix::from_fn(n, |i, j| sol[idx(i, j)].clone());
    if psd_check_exact(&p).is_pd() {
        let rows = p
            .rows()
            .iter()
            .map(|r| r.iter().map(crate::poly::rational::format_rational).collect())
            .collect();
        Ok((LyapunovAnswer::Yes(rows), Some(p)))
    } else {
        Ok((
            LyapunovAnswer::No("solution is not positive definite".into()),
            Some(p),
        ))
    }
}

/// Asymptotic stability of `x' = Ax`, decided exactly.
pub fn hurwitz_test(a: &[Vec<Rational>]) -> Result<bool> {
    Ok(matches!(lyapunov_equation(a)?.0, LyapunovAnswer::Yes(_)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational::rat;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    fn sym(rows: &[&[i64]]) -> SymMatrix<Rational> {
        SymMatrix::from_rows(&m(rows)).unwrap()
    }

    #[test]
    fn identity_is_pd() {
        assert!(psd_check_exact(&sym(&[&[1, 0], &[0, 1]])).is_pd());
    }

    #[test]
    fn indefinite_witness() {
        match psd_check_exact(&sym(&[&[1, 2], &[2, 1]])) {
            PsdVerdict::NotPsd { witness, value } => {
                assert!(value.is_negative());
                assert_eq!(witness, vec![int(1), int(-1)]);
                assert_eq!(value, int(-2));
            }
            other => panic!("expected NotPsd, got {:?}", other),
        }
        // every pair passes, the all-ones direction does not
        let a = SymMatrix::from_fn(3, |i, j| if i == j { int(1) } else { rat(-3, 5) });
        match psd_check_exact(&a) {
            PsdVerdict::NotPsd { witness, value } => {
                assert!(value.is_negative());
                assert_eq!(quadratic_form(&a, &witness), value);
            }
            other => panic!("expected NotPsd, got {:?}", other),
        }
        let v = vec![int(1), int(-1)];
        assert_eq!(quadratic_form(&sym(&[&[1, 2], &[2, 1]]), &v), int(-2));
    }

    #[test]
    fn singular_psd_pivots() {
        assert_eq!(
            psd_check_exact(&sym(&[&[1, 1], &[1, 1]])),
            PsdVerdict::PositiveSemidefinite {
                pivots: vec![int(1), int(0)]
            }
        );
    }

    #[test]
    fn zero_diagonal_with_coupling() {
        match psd_check_exact(&sym(&[&[0, 0, 3], &[0, 1, 0], &[3, 0, 0]])) {
            PsdVerdict::NotPsd { value, .. } => assert!(value.is_negative()),
            other => panic!("unexpected {:?}", other),
        }
        assert!(psd_check_exact(&sym(&[&[0, 0], &[0, 0]])).is_psd());
    }

    #[test]
    fn lyapunov_stable_identity() {
        let (ans, p) = lyapunov_equation(&m(&[&[-1, 0], &[0, -1]])).unwrap();
        assert!(matches!(ans, LyapunovAnswer::Yes(_)));
        let p = p.unwrap();
        assert_eq!(p.get(0, 0), &rat(1, 2));
        assert_eq!(p.get(1, 0), &int(0));
        assert_eq!(p.get(1, 1), &rat(1, 2));
    }

    #[test]
    fn rotation_generator_has_no_solution() {
        // Oracle: the 3x3 system in (p11, p12, p22) is
        //   -2 p12 = -1,  p11 - p22 = 0,  2 p12 = -1  (inconsistent)
        let (ans, _) = lyapunov_equation(&m(&[&[0, 1], &[-1, 0]])).unwrap();
        assert_eq!(ans, LyapunovAnswer::No("no solution".into()));
        assert!(!hurwitz_test(&m(&[&[0, 1], &[-1, 0]])).unwrap());
    }

    #[test]
    fn jordan_block_is_stable() {
        // Oracle solved by hand: p11 = 1/2, p12 = 1/4, p22 = 3/4.
        let (ans, p) = lyapunov_equation(&m(&[&[-1, 1], &[0, -1]])).unwrap();
        assert!(matches!(ans, LyapunovAnswer::Yes(_)));
        let p = p.unwrap();
        assert_eq!(p.get(0, 0), &rat(1, 2));
        assert_eq!(p.get(0, 1), &rat(1, 4));
        assert_eq!(p.get(1, 1), &rat(3, 4));
    }

    #[test]
    fn marginal_and_unstable() {
        assert!(!hurwitz_test(&m(&[&[0, 0], &[0, 0]])).unwrap());
        assert!(!hurwitz_test(&m(&[&[1]])).unwrap());
        assert!(hurwitz_test(&m(&[&[-1, 0], &[0, -1]])).unwrap());
    }
}
