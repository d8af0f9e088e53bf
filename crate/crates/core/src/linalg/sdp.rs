//! Standard-form semidefinite programs over a list of PSD blocks.
//!
//! Primal: find block-diagonal `X ⪰ 0` with `<A_i, X> = b_i` for every
//! constraint, optionally minimizing `<C, X>`. Coefficient matrices are
//! sparse and symmetric; an entry `(i, j, v)` with `i >= j` stands for both
//! `(i, j)` and `(j, i)`.

use serde::{Deserialize, Serialize};

use super::eig::eig_min;
use super::sym::SymMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseEntry {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub entries: Vec<SparseEntry>,
    pub rhs: f64,
}

impl Constraint {
    /// Adds `value` at `(i, j)` of `block`, merging with an existing entry.
    pub fn add(&mut self, block: usize, i: usize, j: usize, value: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if let Some(e) = self
            .entries
            .iter_mut()
            .find(|e| e.block == block && e.i == i && e.j == j)
        {
            e.value += value;
        } else {
            self.entries.push(SparseEntry { block, i, j, value });
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    pub block_dims: Vec<usize>,
    pub constraints: Vec<Constraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<Vec<SparseEntry>>,
}

fn inner_sparse(entries: &[SparseEntry], x: &[SymMatrix<f64>]) -> f64 {
    entries
        .iter()
        .map(|e| {
            let v = *x[e.block].get(e.i, e.j);
            if e.i == e.j {
                e.value * v
            } else {
                2.0 * e.value * v
            }
        })
        .sum()
}

impl SdpProblem {
    pub fn new(block_dims: Vec<usize>) -> Self {
        SdpProblem {
            block_dims,
            constraints: Vec::new(),
            objective: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_dims.is_empty() || self.block_dims.contains(&0) {
            return Err(Error::Invalid("every PSD block needs dimension >= 1".into()));
        }
        if self.constraints.is_empty() {
            return Err(Error::Invalid("SDP needs at least one constraint".into()));
        }
        let entries = self
            .constraints
            .iter()
            .flat_map(|c| c.entries.iter())
            .chain(self.objective.iter().flatten());
        for e in entries {
            let ok = e.block < self.block_dims.len()
                && e.i < self.block_dims[e.block]
                && e.j <= e.i
                && e.value.is_finite();
            if !ok {
                return Err(Error::Invalid(format!(
                    "bad constraint entry (block {}, {}, {}, {})",
                    e.block, e.i, e.j, e.value
                )));
            }
        }
        if self.constraints.iter().any(|c| !c.rhs.is_finite()) {
            return Err(Error::Invalid("non-finite right-hand side".into()));
        }
        Ok(())
    }

    pub fn rhs(&self) -> Vec<f64> {
        self.constraints.iter().map(|c| c.rhs).collect()
    }

    /// `(<A_1, X>, ..., <A_m, X>)`.
    pub fn apply(&self, x: &[SymMatrix<f64>]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|c| inner_sparse(&c.entries, x))
            .collect()
    }

    /// `Σ y_i A_i`, one matrix per block.
    pub fn adjoint(&self, y: &[f64]) -> Vec<SymMatrix<f64>> {
        let mut out: Vec<SymMatrix<f64>> = self
            .block_dims
            .iter()
            .map(|&n| SymMatrix::filled(n, 0.0))
            .collect();
        for (c, &yi) in self.constraints.iter().zip(y) {
            for e in &c.entries {
                let m = &mut out[e.block];
                let v = *m.get(e.i, e.j) + yi * e.value;
                m.set(e.i, e.j, v);
            }
        }
        out
    }

    pub fn objective_value(&self, x: &[SymMatrix<f64>]) -> f64 {
        self.objective
            .as_ref()
            .map(|c| inner_sparse(c, x))
            .unwrap_or(0.0)
    }

    /// Scaled primal residual `‖A(X) - b‖∞ / (1 + ‖b‖∞)`.
    pub fn primal_residual(&self, x: &[SymMatrix<f64>]) -> f64 {
        let ax = self.apply(x);
        let bnorm = self.constraints.iter().fold(0.0f64, |m, c| m.max(c.rhs.abs()));
        let r = ax
            .iter()
            .zip(&self.constraints)
            .fold(0.0f64, |m, (a, c)| m.max((a - c.rhs).abs()));
        r / (1.0 + bnorm)
    }

    /// True when `X` satisfies the constraints and is PSD, both within `tol`.
    pub fn verify_primal(&self, x: &[SymMatrix<f64>], tol: f64) -> bool {
        x.len() == self.block_dims.len()
            && x.iter().zip(&self.block_dims).all(|(b, &n)| b.dim() == n)
            && self.primal_residual(x) <= tol
            && x.iter().all(|b| eig_min(b) >= -tol * b.max_abs().max(1.0))
    }

    /// Checks a Farkas ray: `bᵀy < 0` and, after scaling to `bᵀy = -1`,
    /// `Σ y_i A_i ⪰ -tol·I` on every block. Any feasible `X` would then need
    /// `tol · tr(X) >= 1`.
    pub fn verify_farkas(&self, y: &[f64], tol: f64) -> bool {
        if y.len() != self.constraints.len() || y.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let by: f64 = y.iter().zip(&self.constraints).map(|(a, c)| a * c.rhs).sum();
        if by >= 0.0 || !by.is_finite() {
            return false;
        }
        let scaled: Vec<f64> = y.iter().map(|v| v / -by).collect();
        self.adjoint(&scaled).iter().all(|m| eig_min(m) >= -tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SdpStatus {
    Feasible,
    Infeasible,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Primal blocks; for `Infeasible` the last iterate, for information only.
    pub primal: Vec<SymMatrix<f64>>,
    /// Multipliers; for `Infeasible` the Farkas ray scaled to `bᵀy = -1`.
    pub dual: Vec<f64>,
    /// Dual slack blocks; for `Infeasible` the blocks of `Σ y_i A_i`.
    pub dual_matrix: Vec<SymMatrix<f64>>,
    pub residuals: Residuals,
    pub iterations: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub feas_tol: f64,
    pub gap_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            feas_tol: 1e-8,
            gap_tol: 1e-9,
            max_iter: 200,
        }
    }
}
