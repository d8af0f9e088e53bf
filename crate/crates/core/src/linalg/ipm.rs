//! Primal-dual interior-point method with Nesterov-Todd scaling and a
//! Mehrotra predictor-corrector, plus the phase-1 driver that turns the
//! iterates into verified feasibility or infeasibility answers.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen, SVD};

use super::sdp::{Residuals, SdpProblem, SdpSolution, SdpStatus, SolverOptions};
use super::sym::SymMatrix;
use crate::error::Result;

const STEP_FRACTION: f64 = 0.98;
const DEPENDENCY_TOL: f64 = 1e-10;

type Entry = (usize, usize, f64);

struct Internal {
    dims: Vec<usize>,
    // cons[i][b]: entries of constraint i in block b, row >= col
    cons: Vec<Vec<Vec<Entry>>>,
    touching: Vec<Vec<usize>>,
    b: DVector<f64>,
    c: Vec<DMatrix<f64>>,
}

impl Internal {
    fn new(dims: Vec<usize>, cons: Vec<Vec<Vec<Entry>>>, b: DVector<f64>, c: Vec<DMatrix<f64>>) -> Self {
        let mut touching = vec![Vec::new(); dims.len()];
        for (i, row) in cons.iter().enumerate() {
            for (blk, entries) in row.iter().enumerate() {
                if !entries.is_empty() {
                    touching[blk].push(i);
                }
            }
        }
        Internal { dims, cons, touching, b, c }
    }

    fn zeros(&self) -> Vec<DMatrix<f64>> {
        self.dims.iter().map(|&n| DMatrix::zeros(n, n)).collect()
    }

    fn a_op(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(
            self.cons.len(),
            self.cons.iter().map(|row| {
                row.iter()
                    .zip(x)
                    .map(|(entries, xb)| inner_entries(entries, xb))
                    .sum::<f64>()
            }),
        )
    }

    fn a_adj(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out = self.zeros();
        for (row, &yi) in self.cons.iter().zip(y.iter()) {
            for (entries, ob) in row.iter().zip(out.iter_mut()) {
                for &(i, j, v) in entries {
                    ob[(i, j)] += yi * v;
                    if i != j {
                        ob[(j, i)] += yi * v;
                    }
                }
            }
        }
        out
    }

    /// Schur complement `M_ij = <A_i, W A_j W>`.
    fn schur(&self, w: &[DMatrix<f64>]) -> DMatrix<f64> {
        let m = self.cons.len();
        let mut mat = DMatrix::zeros(m, m);
        for (blk, wb) in w.iter().enumerate() {
            let n = self.dims[blk];
            let mut g = DMatrix::zeros(n, n);
            for &j in &self.touching[blk] {
                let entries = &self.cons[j][blk];
                g.fill(0.0);
                if entries.len() > n {
                    let mut a = DMatrix::zeros(n, n);
                    for &(k, l, v) in entries {
                        a[(k, l)] += v;
                        if k != l {
                            a[(l, k)] += v;
                        }
                    }
                    g = wb * a * wb;
                } else {
                    for &(k, l, v) in entries {
                        for col in 0..n {
                            let fk = v * wb[(l, col)];
                            let fl = v * wb[(k, col)];
                            for row in 0..n {
                                g[(row, col)] += fk * wb[(row, k)];
                                if k != l {
                                    g[(row, col)] += fl * wb[(row, l)];
                                }
                            }
                        }
                    }
                }
                for &i in &self.touching[blk] {
                    if i >= j {
                        mat[(i, j)] += inner_entries(&self.cons[i][blk], &g);
                    }
                }
            }
        }
        for i in 0..m {
            for j in 0..i {
                mat[(j, i)] = mat[(i, j)];
            }
        }
        mat
    }
}

fn inner_entries(entries: &[Entry], x: &DMatrix<f64>) -> f64 {
    entries
        .iter()
        .map(|&(i, j, v)| {
            if i == j {
                v * x[(i, i)]
            } else {
                v * (x[(i, j)] + x[(j, i)])
            }
        })
        .sum()
}

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn max_abs(ms: &[DMatrix<f64>]) -> f64 {
    ms.iter().flat_map(|m| m.iter()).fold(0.0f64, |a, v| a.max(v.abs()))
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

#[derive(Clone)]
struct Iterate {
    x: Vec<DMatrix<f64>>,
    y: DVector<f64>,
    s: Vec<DMatrix<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
enum Stop {
    Converged,
    Callback,
    MaxIter,
    Stalled(String),
}

struct Outcome {
    it: Iterate,
    iterations: usize,
    stop: Stop,
    residuals: Residuals,
}

/// Largest `α` with `L⁻¹(M + α Δ)L⁻ᵀ ⪰ 0` given `linv = L⁻¹`.
fn max_step(linv: &[DMatrix<f64>], d: &[DMatrix<f64>]) -> f64 {
    let mut alpha = f64::INFINITY;
    for (li, db) in linv.iter().zip(d) {
        let m = symmetrize(&(li * db * li.transpose()));
        let lam = SymmetricEigen::new(m).eigenvalues.min();
        if lam < 0.0 {
            alpha = alpha.min(-1.0 / lam);
        }
    }
    alpha
}

struct Scaling {
    g: DMatrix<f64>,
    ginv: DMatrix<f64>,
    w: DMatrix<f64>,
    d: DVector<f64>,
    lx_inv: DMatrix<f64>,
    ls_inv: DMatrix<f64>,
}

fn nt_scaling(x: &DMatrix<f64>, s: &DMatrix<f64>) -> Option<Scaling> {
    let n = x.nrows();
    let lx = Cholesky::new(symmetrize(x))?.l();
    let ls = Cholesky::new(symmetrize(s))?.l();
    let id = DMatrix::identity(n, n);
    let lx_inv = lx.solve_lower_triangular(&id)?;
    let ls_inv = ls.solve_lower_triangular(&id)?;
    let svd = SVD::new(ls.transpose() * &lx, false, true);
    let v = svd.v_t?.transpose();
    let d = svd.singular_values;
    if d.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return None;
    }
    let mut g = &lx * &v;
    let mut ginv = v.transpose() * &lx_inv;
    for k in 0..n {
        let r = d[k].sqrt();
        g.column_mut(k).scale_mut(1.0 / r);
        ginv.row_mut(k).scale_mut(r);
    }
    let w = symmetrize(&(&g * g.transpose()));
    Some(Scaling { g, ginv, w, d, lx_inv, ls_inv })
}

fn factor_schur(m: DMatrix<f64>) -> Option<Cholesky<f64, nalgebra::Dyn>> {
    if let Some(c) = Cholesky::new(m.clone()) {
        return Some(c);
    }
    let scale = (0..m.nrows()).fold(0.0f64, |a, i| a.max(m[(i, i)].abs())).max(1e-300);
    let mut delta = 1e-14 * scale;
    for _ in 0..8 {
        let mut reg = m.clone();
        for i in 0..m.nrows() {
            reg[(i, i)] += delta;
        }
        if let Some(c) = Cholesky::new(reg) {
            return Some(c);
        }
        delta *= 100.0;
    }
    None
}

fn run(
    p: &Internal,
    mut it: Iterate,
    opts: &SolverOptions,
    cb: &mut dyn FnMut(&Iterate) -> bool,
) -> Outcome {
    let total_dim: usize = p.dims.iter().sum();
    let bnorm = p.b.amax();
    let cnorm = max_abs(&p.c);
    let mut residuals = Residuals { primal: f64::NAN, dual: f64::NAN, gap: f64::NAN };
    let mut stalls = 0;
    for iter in 0..opts.max_iter {
        let rp = &p.b - p.a_op(&it.x);
        let aty = p.a_adj(&it.y);
        let rd: Vec<DMatrix<f64>> = p
            .c
            .iter()
            .zip(&aty)
            .zip(&it.s)
            .map(|((c, a), s)| c - a - s)
            .collect();
        let pobj = inner(&p.c, &it.x);
        let dobj = p.b.dot(&it.y);
        let mu = inner(&it.x, &it.s) / total_dim as f64;
        residuals = Residuals {
            primal: rp.amax() / (1.0 + bnorm),
            dual: max_abs(&rd) / (1.0 + cnorm),
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        };
        if !mu.is_finite() || !residuals.primal.is_finite() || !residuals.dual.is_finite() {
            return Outcome { it, iterations: iter, stop: Stop::Stalled("non-finite iterate".into()), residuals };
        }
        if cb(&it) {
            return Outcome { it, iterations: iter, stop: Stop::Callback, residuals };
        }
        if residuals.primal <= opts.feas_tol
            && residuals.dual <= opts.feas_tol
            && residuals.gap <= opts.gap_tol
        {
            return Outcome { it, iterations: iter, stop: Stop::Converged, residuals };
        }

        let mut scalings = Vec::with_capacity(p.dims.len());
        for (x, s) in it.x.iter().zip(&it.s) {
            match nt_scaling(x, s) {
                Some(sc) => scalings.push(sc),
                None => {
                    return Outcome {
                        it,
                        iterations: iter,
                        stop: Stop::Stalled("iterate left the cone".into()),
                        residuals,
                    }
                }
            }
        }
        let w: Vec<DMatrix<f64>> = scalings.iter().map(|s| s.w.clone()).collect();
        let Some(chol) = factor_schur(p.schur(&w)) else {
            return Outcome {
                it,
                iterations: iter,
                stop: Stop::Stalled("Schur complement is singular".into()),
                residuals,
            };
        };
        let wrdw: Vec<DMatrix<f64>> = w.iter().zip(&rd).map(|(w, r)| w * r * w).collect();
        let direction = |rc: &[DMatrix<f64>]| {
            let t: Vec<DMatrix<f64>> = rc.iter().zip(&wrdw).map(|(a, b)| a - b).collect();
            let rhs = &rp - p.a_op(&t);
            let dy = chol.solve(&rhs);
            let ady = p.a_adj(&dy);
            let ds: Vec<DMatrix<f64>> = rd.iter().zip(&ady).map(|(r, a)| symmetrize(&(r - a))).collect();
            let dx: Vec<DMatrix<f64>> = rc
                .iter()
                .zip(&w)
                .zip(&ds)
                .map(|((r, w), d)| symmetrize(&(r - w * d * w)))
                .collect();
            (dx, dy, ds)
        };
        let lx_inv: Vec<DMatrix<f64>> = scalings.iter().map(|s| s.lx_inv.clone()).collect();
        let ls_inv: Vec<DMatrix<f64>> = scalings.iter().map(|s| s.ls_inv.clone()).collect();

        let rc_aff: Vec<DMatrix<f64>> = it.x.iter().map(|x| -x).collect();
        let (dx, _, ds) = direction(&rc_aff);
        let ap = max_step(&lx_inv, &dx).min(1.0);
        let ad = max_step(&ls_inv, &ds).min(1.0);
        let xa: Vec<DMatrix<f64>> = it.x.iter().zip(&dx).map(|(x, d)| x + d * ap).collect();
        let sa: Vec<DMatrix<f64>> = it.s.iter().zip(&ds).map(|(s, d)| s + d * ad).collect();
        let mu_aff = inner(&xa, &sa) / total_dim as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let rc: Vec<DMatrix<f64>> = scalings
            .iter()
            .zip(dx.iter().zip(&ds))
            .map(|(sc, (dxb, dsb))| {
                let n = sc.d.len();
                let dxt = &sc.ginv * dxb * sc.ginv.transpose();
                let dst = sc.g.transpose() * dsb * &sc.g;
                let cross = symmetrize(&(&dxt * &dst));
                let mut e = DMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        let mut r = -cross[(i, j)];
                        if i == j {
                            r += sigma * mu - sc.d[i] * sc.d[i];
                        }
                        e[(i, j)] = 2.0 * r / (sc.d[i] + sc.d[j]);
                    }
                }
                symmetrize(&(&sc.g * e * sc.g.transpose()))
            })
            .collect();
        let (dx, dy, ds) = direction(&rc);
        let ap = (STEP_FRACTION * max_step(&lx_inv, &dx)).min(1.0);
        let ad = (STEP_FRACTION * max_step(&ls_inv, &ds)).min(1.0);
        if !(ap.is_finite() && ad.is_finite()) {
            return Outcome { it, iterations: iter, stop: Stop::Stalled("bad step".into()), residuals };
        }
        for (x, d) in it.x.iter_mut().zip(&dx) {
            *x += d * ap;
        }
        for (s, d) in it.s.iter_mut().zip(&ds) {
            *s += d * ad;
        }
        it.y += dy * ad;
        if ap < 1e-10 && ad < 1e-10 {
            stalls += 1;
            if stalls >= 3 {
                return Outcome {
                    it,
                    iterations: iter + 1,
                    stop: Stop::Stalled("step lengths collapsed".into()),
                    residuals,
                };
            }
        } else {
            stalls = 0;
        }
    }
    Outcome { it, iterations: opts.max_iter, stop: Stop::MaxIter, residuals }
}

fn to_sym(ms: &[DMatrix<f64>]) -> Vec<SymMatrix<f64>> {
    ms.iter().map(|m| SymMatrix::from_dense(&symmetrize(m))).collect()
}

struct Reduction {
    keep: Vec<usize>,
    gram: Option<Cholesky<f64, nalgebra::Dyn>>,
    farkas: Option<Vec<f64>>,
}

fn frob_key(e: &super::sdp::SparseEntry) -> (usize, usize, usize) {
    (e.block, e.i, e.j)
}

/// Drops linearly dependent constraints, reporting a Farkas ray when a
/// dependent constraint contradicts the others.
fn reduce(problem: &SdpProblem, tol: f64) -> Reduction {
    use std::collections::BTreeMap;
    let m = problem.constraints.len();
    let mut by_key: BTreeMap<(usize, usize, usize), Vec<(usize, f64)>> = BTreeMap::new();
    for (idx, c) in problem.constraints.iter().enumerate() {
        let mut local: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
        for e in &c.entries {
            *local.entry(frob_key(e)).or_insert(0.0) += e.value;
        }
        for (k, v) in local {
            let w = if k.1 == k.2 { v } else { v * std::f64::consts::SQRT_2 };
            if w != 0.0 {
                by_key.entry(k).or_default().push((idx, w));
            }
        }
    }
    let mut k = DMatrix::<f64>::zeros(m, m);
    for list in by_key.values() {
        for &(i, a) in list {
            for &(j, b) in list {
                k[(i, j)] += a * b;
            }
        }
    }
    let b: Vec<f64> = problem.rhs();
    let bnorm = b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut keep: Vec<usize> = Vec::new();
    let mut l: Vec<Vec<f64>> = Vec::new();
    for d in 0..m {
        let kd: Vec<f64> = keep.iter().map(|&i| k[(i, d)]).collect();
        let mut z = vec![0.0; keep.len()];
        for r in 0..keep.len() {
            let s: f64 = (0..r).map(|c| l[r][c] * z[c]).sum();
            z[r] = (kd[r] - s) / l[r][r];
        }
        let res = k[(d, d)] - z.iter().map(|v| v * v).sum::<f64>();
        if k[(d, d)] > 0.0 && res > DEPENDENCY_TOL * k[(d, d)] {
            let mut row = z;
            row.push(res.sqrt());
            l.push(row);
            keep.push(d);
            continue;
        }
        let mut c = vec![0.0; keep.len()];
        for r in (0..keep.len()).rev() {
            let s: f64 = (r + 1..keep.len()).map(|q| l[q][r] * c[q]).sum();
            c[r] = (z[r] - s) / l[r][r];
        }
        let predicted: f64 = keep.iter().zip(&c).map(|(&i, ci)| ci * b[i]).sum();
        let gap = b[d] - predicted;
        if gap.abs() > tol * (1.0 + bnorm) {
            let mut y = vec![0.0; m];
            y[d] = 1.0;
            for (&i, ci) in keep.iter().zip(&c) {
                y[i] = -ci;
            }
            let y: Vec<f64> = y.iter().map(|v| -v / gap).collect();
            if problem.verify_farkas(&y, tol) {
                return Reduction { keep, gram: None, farkas: Some(y) };
            }
        }
    }
    let r = keep.len();
    let gram = Cholesky::new(DMatrix::from_fn(r, r, |i, j| k[(keep[i], keep[j])]));
    Reduction { keep, gram, farkas: None }
}

fn internal_cons(problem: &SdpProblem, keep: &[usize]) -> Vec<Vec<Vec<Entry>>> {
    keep.iter()
        .map(|&i| {
            let mut row = vec![Vec::new(); problem.block_dims.len()];
            for e in &problem.constraints[i].entries {
                if e.value != 0.0 {
                    row[e.block].push((e.i, e.j, e.value));
                }
            }
            row
        })
        .collect()
}

fn identity_blocks(dims: &[usize], scale: f64) -> Vec<DMatrix<f64>> {
    dims.iter().map(|&n| DMatrix::identity(n, n) * scale).collect()
}

/// Solves the feasibility problem (and, when an objective is present, the
/// optimization problem). `Feasible` and `Infeasible` answers are checked
/// against `problem` before being returned.
pub fn solve_sdp(problem: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    problem.validate()?;
    let nb = problem.block_dims.len();
    let tol = opts.feas_tol;
    let red = reduce(problem, tol);
    let zero_blocks: Vec<SymMatrix<f64>> =
        problem.block_dims.iter().map(|&n| SymMatrix::filled(n, 0.0)).collect();
    if let Some(y) = red.farkas {
        let dual_matrix = problem.adjoint(&y);
        return Ok(SdpSolution {
            status: SdpStatus::Infeasible,
            primal: zero_blocks,
            dual: y,
            dual_matrix,
            residuals: Residuals { primal: f64::NAN, dual: 0.0, gap: f64::NAN },
            iterations: 0,
            message: "inconsistent linear constraints".into(),
        });
    }
    let keep = red.keep;
    let gram = red.gram;
    let cons = internal_cons(problem, &keep);
    let b = DVector::from_iterator(keep.len(), keep.iter().map(|&i| problem.constraints[i].rhs));

    let polish = |x: &[DMatrix<f64>], base: &Internal| -> Vec<SymMatrix<f64>> {
        let mut x: Vec<DMatrix<f64>> = x[..nb].to_vec();
        if let Some(g) = &gram {
            let ax = DVector::from_iterator(
                base.cons.len(),
                base.cons.iter().map(|row| {
                    row.iter().zip(&x).map(|(e, xb)| inner_entries(e, xb)).sum::<f64>()
                }),
            );
            let corr = g.solve(&(&b - ax));
            let adj = base.a_adj(&corr);
            for (xb, a) in x.iter_mut().zip(&adj) {
                *xb += &a.view((0, 0), (xb.nrows(), xb.ncols()));
            }
        }
        to_sym(&x)
    };

    // phase 1: minimize σ subject to A(X) + σ r = b with r = b - A(I)
    let orig = Internal::new(
        problem.block_dims.clone(),
        cons.clone(),
        b.clone(),
        identity_blocks(&problem.block_dims, 0.0),
    );
    let r = &b - orig.a_op(&identity_blocks(&problem.block_dims, 1.0));
    let start_feasible = r.amax() <= tol * (1.0 + b.amax());

    let mut found: Option<(SdpStatus, Vec<SymMatrix<f64>>, Vec<f64>, Vec<SymMatrix<f64>>)> = None;
    let mut iterations = 0;
    let mut residuals = Residuals { primal: 0.0, dual: 0.0, gap: 0.0 };
    let mut message = String::new();
    if start_feasible {
        let x = to_sym(&identity_blocks(&problem.block_dims, 1.0));
        if problem.verify_primal(&x, tol) {
            found = Some((SdpStatus::Feasible, x, vec![0.0; problem.constraints.len()], zero_blocks.clone()));
        }
    }
    if found.is_none() {
        let mut dims = problem.block_dims.clone();
        dims.push(1);
        let mut pcons = cons.clone();
        for (row, ri) in pcons.iter_mut().zip(r.iter()) {
            row.push(if *ri != 0.0 { vec![(0, 0, *ri)] } else { Vec::new() });
        }
        let mut c = identity_blocks(&problem.block_dims, 0.0);
        c.push(DMatrix::from_element(1, 1, 1.0));
        let phase1 = Internal::new(dims.clone(), pcons, b.clone(), c);
        let start = Iterate {
            x: identity_blocks(&dims, 1.0),
            y: DVector::zeros(keep.len()),
            s: identity_blocks(&dims, 1.0),
        };
        let mut hit = None;
        let mut cb = |it: &Iterate| -> bool {
            let sigma = it.x[nb][(0, 0)];
            if sigma <= 0.1 {
                let x = polish(&it.x, &orig);
                if problem.verify_primal(&x, tol) {
                    let mut y = vec![0.0; problem.constraints.len()];
                    for (&i, v) in keep.iter().zip(it.y.iter()) {
                        y[i] = *v;
                    }
                    hit = Some((SdpStatus::Feasible, x, y, to_sym(&it.s[..nb])));
                    return true;
                }
            }
            let by = b.dot(&it.y);
            if by > 0.0 {
                let mut y = vec![0.0; problem.constraints.len()];
                for (&i, v) in keep.iter().zip(it.y.iter()) {
                    y[i] = -v / by;
                }
                if problem.verify_farkas(&y, tol) {
                    let dm = problem.adjoint(&y);
                    hit = Some((SdpStatus::Infeasible, to_sym(&it.x[..nb]), y, dm));
                    return true;
                }
            }
            false
        };
        let out = run(&phase1, start, opts, &mut cb);
        iterations = out.iterations;
        residuals = out.residuals;
        found = hit;
        if found.is_none() {
            message = match out.stop {
                Stop::Converged => format!(
                    "phase 1 converged with σ = {:.3e} but no certificate verified",
                    out.it.x[nb][(0, 0)]
                ),
                Stop::MaxIter => "iteration limit reached".into(),
                Stop::Stalled(s) => s,
                Stop::Callback => String::new(),
            };
            return Ok(SdpSolution {
                status: SdpStatus::Indeterminate,
                primal: to_sym(&out.it.x[..nb]),
                dual: keep_to_full(&keep, &out.it.y, problem.constraints.len()),
                dual_matrix: to_sym(&out.it.s[..nb]),
                residuals,
                iterations,
                message,
            });
        }
    }
    let (status, mut primal, mut dual, mut dual_matrix) = found.expect("phase 1 result");
    if status == SdpStatus::Infeasible {
        return Ok(SdpSolution {
            status,
            primal,
            dual,
            dual_matrix,
            residuals,
            iterations,
            message: "Farkas ray verified".into(),
        });
    }
    message.push_str("feasible point verified");
    if let Some(obj) = &problem.objective {
        let mut c = identity_blocks(&problem.block_dims, 0.0);
        for e in obj {
            c[e.block][(e.i, e.j)] += e.value;
            if e.i != e.j {
                c[e.block][(e.j, e.i)] += e.value;
            }
        }
        let scale = max_abs(&c).max(1.0);
        let phase2 = Internal::new(problem.block_dims.clone(), cons, b.clone(), c);
        let start = Iterate {
            x: identity_blocks(&problem.block_dims, 1.0),
            y: DVector::zeros(keep.len()),
            s: identity_blocks(&problem.block_dims, scale),
        };
        let out = run(&phase2, start, opts, &mut |_| false);
        iterations += out.iterations;
        let x = polish(&out.it.x, &orig);
        if problem.verify_primal(&x, tol) {
            primal = x;
            dual = keep_to_full(&keep, &out.it.y, problem.constraints.len());
            dual_matrix = to_sym(&out.it.s);
            residuals = out.residuals;
            if out.stop == Stop::Converged {
                message = "optimal point verified".into();
            } else {
                message.push_str("; objective not fully optimized");
            }
        } else {
            message.push_str("; phase 2 failed, returning phase 1 point");
        }
    }
    residuals.primal = problem.primal_residual(&primal);
    Ok(SdpSolution { status, primal, dual, dual_matrix, residuals, iterations, message })
}

fn keep_to_full(keep: &[usize], y: &DVector<f64>, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m];
    for (&i, v) in keep.iter().zip(y.iter()) {
        out[i] = *v;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig::eig_min;
    use crate::linalg::sdp::Constraint;

    fn cons(entries: &[(usize, usize, usize, f64)], rhs: f64) -> Constraint {
        let mut c = Constraint { entries: Vec::new(), rhs };
        for &(b, i, j, v) in entries {
            c.add(b, i, j, v);
        }
        c
    }

    #[test]
    fn feasible_two_by_two() {
        // X11 = 1, X22 = 1, X12 = 0.5
        let mut p = SdpProblem::new(vec![2]);
        p.constraints.push(cons(&[(0, 0, 0, 1.0)], 1.0));
        p.constraints.push(cons(&[(0, 1, 1, 1.0)], 1.0));
        p.constraints.push(cons(&[(0, 1, 0, 0.5)], 0.5));
        let sol = solve_sdp(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Feasible);
        assert!((sol.primal[0].get(1, 0) - 0.5).abs() < 1e-7);
    }

    #[test]
    fn infeasible_by_psd() {
        // X11 = 1, X22 = 1, X12 = 2 is not PSD
        let mut p = SdpProblem::new(vec![2]);
        p.constraints.push(cons(&[(0, 0, 0, 1.0)], 1.0));
        p.constraints.push(cons(&[(0, 1, 1, 1.0)], 1.0));
        p.constraints.push(cons(&[(0, 1, 0, 1.0)], 4.0));
        let sol = solve_sdp(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible, "{sol:?}");
        assert!(p.verify_farkas(&sol.dual, 1e-8));
    }

    #[test]
    fn negative_trace_is_infeasible() {
        let mut p = SdpProblem::new(vec![3]);
        p.constraints.push(cons(&[(0, 0, 0, 1.0), (0, 1, 1, 1.0), (0, 2, 2, 1.0)], -1.0));
        let sol = solve_sdp(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
    }

    #[test]
    fn inconsistent_duplicate_rows() {
        let mut p = SdpProblem::new(vec![2]);
        p.constraints.push(cons(&[(0, 0, 0, 1.0)], 1.0));
        p.constraints.push(cons(&[(0, 0, 0, 2.0)], 3.0));
        let sol = solve_sdp(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
        assert!(p.verify_farkas(&sol.dual, 1e-8));
    }

    #[test]
    fn zero_row_with_nonzero_rhs() {
        let mut p = SdpProblem::new(vec![2]);
        p.constraints.push(cons(&[(0, 0, 0, 1.0)], 1.0));
        p.constraints.push(Constraint { entries: Vec::new(), rhs: 1.0 });
        let sol = solve_sdp(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
    }

    #[test]
    fn boundary_feasible_point() {
        // only X = [[1,1],[1,1]] fits: singular optimum
        let mut p = SdpProblem::new(vec![2]);
        p.constraints.push(cons(&[(0, 0, 0, 1.0)], 1.0));
        p.constraints.push(cons(&[(0, 1, 1, 1.0)], 1.0));
        p.constraints.push(cons(&[(0, 1, 0, 1.0)], 1.0));
        let sol = solve_sdp(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Feasible);
        assert!(eig_min(&sol.primal[0]) > -1e-8);
    }

    #[test]
    fn minimizes_linear_objective() {
        // min X12 with X11 = X22 = 1 has optimum -1
        let mut p = SdpProblem::new(vec![2]);
        p.constraints.push(cons(&[(0, 0, 0, 1.0)], 1.0));
        p.constraints.push(cons(&[(0, 1, 1, 1.0)], 1.0));
        p.objective = Some(vec![super::super::sdp::SparseEntry { block: 0, i: 1, j: 0, value: 0.5 }]);
        let sol = solve_sdp(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Feasible);
        assert!((sol.primal[0].get(1, 0) + 1.0).abs() < 1e-6, "{:?}", sol.primal[0]);
    }

    #[test]
    fn several_blocks() {
        // block 0 is 2x2, block 1 is 1x1; X0_11 + x1 = 1, X0_22 = 2, x1 = 0.25
        let mut p = SdpProblem::new(vec![2, 1]);
        p.constraints.push(cons(&[(0, 0, 0, 1.0), (1, 0, 0, 1.0)], 1.0));
        p.constraints.push(cons(&[(0, 1, 1, 1.0)], 2.0));
        p.constraints.push(cons(&[(1, 0, 0, 1.0)], 0.25));
        let sol = solve_sdp(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Feasible);
        assert!((sol.primal[0].get(0, 0) - 0.75).abs() < 1e-7);
    }

    #[test]
    fn rejects_bad_entries() {
        let mut p = SdpProblem::new(vec![2]);
        p.constraints.push(cons(&[(0, 2, 0, 1.0)], 1.0));
        assert!(solve_sdp(&p, &SolverOptions::default()).is_err());
    }
}
