use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Dense symmetric matrix stored as its lower triangle, row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix<T> {
    dim: usize,
    lower: Vec<T>,
}

fn tri(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

impl<T: Clone> SymMatrix<T> {
    pub fn from_fn<F: FnMut(usize, usize) -> T>(dim: usize, mut f: F) -> Self {
        let mut lower = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in 0..=i {
                lower.push(f(i, j));
            }
        }
        SymMatrix { dim, lower }
    }

    pub fn filled(dim: usize, v: T) -> Self {
        SymMatrix {
            dim,
            lower: vec![v; dim * (dim + 1) / 2],
        }
    }

    /// Builds from full rows; `None` if the rows are not square and symmetric.
    pub fn from_rows(rows: &[Vec<T>]) -> Option<Self>
    where
        T: PartialEq,
    {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return None;
                }
            }
        }
        Some(Self::from_fn(n, |i, j| rows[i][j].clone()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.lower[tri(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.lower[tri(i, j)] = v;
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn map<U: Clone, F: FnMut(&T) -> U>(&self, f: F) -> SymMatrix<U> {
        SymMatrix {
            dim: self.dim,
            lower: self.lower.iter().map(f).collect(),
        }
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }
}

impl SymMatrix<f64> {
    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| *self.get(i, j))
    }

    /// Symmetric part of a dense matrix.
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..=i {
                let v = self.get(i, j);
                s += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        s.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.lower.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
