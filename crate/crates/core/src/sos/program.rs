//! Linear programs over several Gram blocks with exact rational data.
//!
//! Each row is an identity between polynomial coefficients: for every
//! monomial, the linear image of the Gram matrices must match a target
//! polynomial. Extra rows (such as a trace normalization) can be added.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::basis::GramBasis;
use crate::linalg::eig::eig_min;
use crate::linalg::exact::psd_check_exact;
use crate::linalg::sdp::{Constraint, SdpProblem, SparseEntry};
use crate::linalg::sym::SymMatrix;
use crate::poly::rational::{best_approx, from_f64_exact, to_f64, Rational};
use crate::poly::{Monomial, Polynomial};

/// `(block, i, j, value)` with `i >= j`; off-diagonal entries count twice.
pub type ExactEntry = (usize, usize, usize, Rational);

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExactConstraint {
    pub entries: Vec<ExactEntry>,
    pub rhs: Rational,
}

impl ExactConstraint {
    fn add(&mut self, block: usize, i: usize, j: usize, v: &Rational) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if let Some(e) = self.entries.iter_mut().find(|e| e.0 == block && e.1 == i && e.2 == j) {
            e.3 += v;
        } else {
            self.entries.push((block, i, j, v.clone()));
        }
    }

    fn apply(&self, x: &[SymMatrix<Rational>]) -> Rational {
        let mut acc = Rational::zero();
        for (b, i, j, v) in &self.entries {
            let t = v * x[*b].get(*i, *j);
            if i == j {
                acc += t;
            } else {
                acc += &t + &t;
            }
        }
        acc
    }
}

#[derive(Debug, Clone)]
pub struct GramProgram {
    nvars: usize,
    blocks: Vec<GramBasis>,
    rows: BTreeMap<Monomial, ExactConstraint>,
    extra: Vec<ExactConstraint>,
}

impl GramProgram {
    pub fn new(nvars: usize, blocks: Vec<GramBasis>) -> Self {
        GramProgram {
            nvars,
            blocks,
            rows: BTreeMap::new(),
            extra: Vec::new(),
        }
    }

    /// The program `zᵀQz = p` for a single block.
    pub fn single(p: &Polynomial, basis: &GramBasis) -> Self {
        let mut prog = GramProgram::new(p.nvars(), vec![basis.clone()]);
        let one = Rational::one();
        for i in 0..basis.len() {
            for j in 0..=i {
                let m = basis.get(i).mul(basis.get(j));
                prog.rows.entry(m).or_default().add(0, i, j, &one);
            }
        }
        prog.add_target(p);
        prog
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn blocks(&self) -> &[GramBasis] {
        &self.blocks
    }

    /// Gram entry `(i, j)` of `block` contributes `image` (the image of
    /// `z_i z_j` under the program's linear map) to the identity.
    pub fn add_gram_image(&mut self, block: usize, i: usize, j: usize, image: &Polynomial) {
        for (m, c) in image.terms() {
            self.rows.entry(m.clone()).or_default().add(block, i, j, c);
        }
    }

    /// Adds `p` to the right-hand side of the identity.
    pub fn add_target(&mut self, p: &Polynomial) {
        for (m, c) in p.terms() {
            self.rows.entry(m.clone()).or_default().rhs += c;
        }
    }

    pub fn add_constraint(&mut self, c: ExactConstraint) {
        self.extra.push(c);
    }

    /// Monomial of each identity row, in constraint order (extras follow).
    pub fn row_monomials(&self) -> Vec<Monomial> {
        self.rows.keys().cloned().collect()
    }

    pub fn constraints(&self) -> Vec<ExactConstraint> {
        self.rows.values().cloned().chain(self.extra.iter().cloned()).collect()
    }

    /// Monomials whose row has no Gram entries but a nonzero target.
    pub fn uncovered(&self) -> Vec<Monomial> {
        self.rows
            .iter()
            .filter(|(_, r)| r.entries.iter().all(|e| e.3.is_zero()) && !r.rhs.is_zero())
            .map(|(m, _)| m.clone())
            .collect()
    }

    pub fn to_sdp(&self) -> SdpProblem {
        let mut p = SdpProblem::new(self.blocks.iter().map(|b| b.len().max(1)).collect());
        for c in self.constraints() {
            let mut out = Constraint { entries: Vec::new(), rhs: to_f64(&c.rhs) };
            for (block, i, j, v) in &c.entries {
                if !v.is_zero() {
                    out.entries.push(SparseEntry { block: *block, i: *i, j: *j, value: to_f64(v) });
                }
            }
            p.constraints.push(out);
        }
        p
    }

    /// Exact check of every row.
    pub fn satisfied_by(&self, x: &[SymMatrix<Rational>]) -> bool {
        x.len() == self.blocks.len()
            && self.constraints().iter().all(|c| c.apply(x) == c.rhs)
    }

    pub fn projector(&self) -> Projector {
        Projector::new(self)
    }
}

/// Exact orthogonal projection onto the affine set of a [`GramProgram`],
/// in the coordinates `(X_ii, X_ij)` of the stored lower triangles.
pub struct Projector {
    dims: Vec<usize>,
    offsets: Vec<usize>,
    rows: Vec<Vec<(usize, Rational)>>,
    rhs: Vec<Rational>,
    // Gaussian elimination of A Aᵀ: unit-lower multipliers and upper rows
    lower: Vec<Vec<(usize, Rational)>>,
    upper: Vec<Vec<Rational>>,
    pivot: Vec<bool>,
}

fn tri(i: usize, j: usize) -> usize {
    i * (i + 1) / 2 + j
}

impl Projector {
    fn new(prog: &GramProgram) -> Self {
        let dims: Vec<usize> = prog.blocks.iter().map(|b| b.len().max(1)).collect();
        let mut offsets = Vec::with_capacity(dims.len());
        let mut acc = 0;
        for &n in &dims {
            offsets.push(acc);
            acc += n * (n + 1) / 2;
        }
        let cons = prog.constraints();
        let mut rows = Vec::with_capacity(cons.len());
        let mut rhs = Vec::with_capacity(cons.len());
        for c in &cons {
            let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
            for (b, i, j, v) in &c.entries {
                let w = if i == j { v.clone() } else { v + v };
                *row.entry(offsets[*b] + tri(*i, *j)).or_insert_with(Rational::zero) += w;
            }
            rows.push(row.into_iter().filter(|(_, v)| !v.is_zero()).collect::<Vec<_>>());
            rhs.push(c.rhs.clone());
        }
        let m = rows.len();
        let mut by_var: BTreeMap<usize, Vec<(usize, Rational)>> = BTreeMap::new();
        for (r, row) in rows.iter().enumerate() {
            for (v, c) in row {
                by_var.entry(*v).or_default().push((r, c.clone()));
            }
        }
        let mut k = vec![vec![Rational::zero(); m]; m];
        for list in by_var.values() {
            for (a, ca) in list {
                for (b, cb) in list {
                    k[*a][*b] += ca * cb;
                }
            }
        }
        let mut lower: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); m];
        let mut pivot = vec![false; m];
        for p in 0..m {
            if k[p][p].is_zero() {
                continue;
            }
            pivot[p] = true;
            let (head, tail) = k.split_at_mut(p + 1);
            let prow = &head[p];
            for (off, row) in tail.iter_mut().enumerate() {
                let i = p + 1 + off;
                if row[p].is_zero() {
                    continue;
                }
                let f = &row[p] / &prow[p];
                for j in p..m {
                    if !prow[j].is_zero() {
                        let d = &f * &prow[j];
                        row[j] -= d;
                    }
                }
                lower[i].push((p, f));
            }
        }
        Projector { dims, offsets, rows, rhs, lower, upper: k, pivot }
    }

    fn solve(&self, mut r: Vec<Rational>) -> Vec<Rational> {
        let m = r.len();
        for i in 0..m {
            for (p, f) in &self.lower[i] {
                let d = f * &r[*p];
                r[i] -= d;
            }
        }
        let mut z = vec![Rational::zero(); m];
        for i in (0..m).rev() {
            if !self.pivot[i] {
                continue;
            }
            let mut acc = r[i].clone();
            for j in i + 1..m {
                if self.pivot[j] && !self.upper[i][j].is_zero() && !z[j].is_zero() {
                    acc -= &self.upper[i][j] * &z[j];
                }
            }
            z[i] = acc / &self.upper[i][i];
        }
        z
    }

    /// Projects `x` (given as stored lower triangles) onto the affine set.
    pub fn project(&self, x: &[SymMatrix<Rational>]) -> Vec<SymMatrix<Rational>> {
        let mut flat: Vec<Rational> = x.iter().flat_map(|b| b.lower().iter().cloned()).collect();
        let resid: Vec<Rational> = self
            .rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| {
                let mut acc = b.clone();
                for (v, c) in row {
                    acc -= c * &flat[*v];
                }
                acc
            })
            .collect();
        let z = self.solve(resid);
        for (row, zr) in self.rows.iter().zip(&z) {
            if zr.is_zero() {
                continue;
            }
            for (v, c) in row {
                flat[*v] += c * zr;
            }
        }
        self.dims
            .iter()
            .zip(&self.offsets)
            .map(|(&n, &off)| {
                let vals = &flat[off..off + n * (n + 1) / 2];
                SymMatrix::from_fn(n, |i, j| vals[tri(i, j)].clone())
            })
            .collect()
    }
}

/// Rounds each block entry to the best rational with denominator at most
/// `bound`, projects exactly and returns the blocks if all of them are PSD
/// and satisfy the program exactly.
pub fn rationalize_blocks(
    prog: &GramProgram,
    proj: &Projector,
    blocks: &[SymMatrix<f64>],
    bound: u64,
) -> Option<Vec<SymMatrix<Rational>>> {
    let den = BigInt::from(bound);
    let mut rounded = Vec::with_capacity(blocks.len());
    for b in blocks {
        let mut ok = true;
        let r = b.map(|&v| match from_f64_exact(v) {
            Some(q) => best_approx(&q, &den),
            None => {
                ok = false;
                Rational::zero()
            }
        });
        if !ok {
            return None;
        }
        rounded.push(r);
    }
    let projected = proj.project(&rounded);
    if !prog.satisfied_by(&projected) {
        return None;
    }
    // cheap screen before the exact factorization, which is costly on large rationals
    let clearly_indefinite = projected.iter().any(|q| {
        let f = q.map(to_f64);
        eig_min(&f) < -1e-9 * f.max_abs().max(1.0)
    });
    if clearly_indefinite {
        return None;
    }
    if projected.iter().all(|q| psd_check_exact(q).is_psd()) {
        Some(projected)
    } else {
        None
    }
}

/// Smallest eigenvalue of every block exceeds `margin · max(1, ‖Q‖max)`;
/// rounding is only worth attempting on such interior points.
pub fn strictly_interior(blocks: &[SymMatrix<f64>], margin: f64) -> bool {
    blocks.iter().all(|q| eig_min(q) > margin * q.max_abs().max(1.0))
}

/// Denominator bounds tried by [`rationalize_schedule`]: 10², doubling, up
/// to 10¹².
pub fn denominator_schedule() -> Vec<u64> {
    let mut out = Vec::new();
    let mut d: u64 = 100;
    while d < 1_000_000_000_000 {
        out.push(d);
        d *= 2;
    }
    out.push(1_000_000_000_000);
    out
}

pub fn rationalize_schedule(
    prog: &GramProgram,
    blocks: &[SymMatrix<f64>],
) -> Option<(Vec<SymMatrix<Rational>>, u64)> {
    let proj = prog.projector();
    denominator_schedule()
        .into_iter()
        .find_map(|d| rationalize_blocks(prog, &proj, blocks, d).map(|q| (q, d)))
}
