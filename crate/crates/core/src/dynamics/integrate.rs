use std::thread;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::poly::rational::to_f64;
use crate::poly::{Polynomial, VectorField};

/// Float copy of a polynomial for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    pub fn new(p: &Polynomial) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let powers = m
                    .exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e as i32))
                    .collect();
                (to_f64(c), powers)
            })
            .collect();
        CompiledPoly {
            nvars: p.nvars(),
            terms,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, pw)| pw.iter().fold(*c, |acc, &(i, e)| acc * x[i].powi(e)))
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct CompiledField {
    components: Vec<CompiledPoly>,
}

impl CompiledField {
    pub fn new(f: &VectorField) -> Self {
        CompiledField {
            components: f.components().iter().map(CompiledPoly::new).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.components.len()
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.eval(x);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub t_end: f64,
    pub initial_step: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
    pub blowup_radius: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            t_end: 100.0,
            initial_step: 1e-3,
            abs_tol: 1e-12,
            rel_tol: 1e-9,
            max_steps: 200_000,
            blowup_radius: 1e6,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.t_end > 0.0
            && self.initial_step > 0.0
            && self.abs_tol > 0.0
            && self.rel_tol > 0.0
            && self.blowup_radius > 0.0
            && self.max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(
                "simulation tolerances, step, horizon and blow-up radius must be positive".into(),
            ))
        }
    }
}

pub const CONVERGED_RADIUS: f64 = 1e-8;
pub const CONVERGED_STEPS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Terminal {
    /// `||x|| < 1e-8` held for ten consecutive accepted steps.
    Converged,
    /// `||x||` exceeded the blow-up radius or the state stopped being finite.
    Escaped { non_finite: bool },
    MaxSteps,
    /// Reached `t_end` without any of the above.
    TimeLimit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub terminal: Terminal,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().map_or(&[], Vec::as_slice)
    }

    pub fn converged(&self) -> bool {
        self.terminal == Terminal::Converged
    }

    /// `t,x1,...,xn` with one row per sample.
    pub fn to_csv(&self) -> String {
        let n = self.nvars();
        let mut s = String::from("t");
        for i in 1..=n {
            s.push_str(&format!(",x{i}"));
        }
        s.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            s.push_str(&format!("{t:e}"));
            for v in x {
                s.push_str(&format!(",{v:e}"));
            }
            s.push('\n');
        }
        s
    }
}

// Dormand-Prince 5(4) tableau
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Stepper<'a> {
    f: &'a CompiledField,
    k: Vec<Vec<f64>>,
    tmp: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(f: &'a CompiledField) -> Self {
        let n = f.nvars();
        Stepper {
            f,
            k: vec![vec![0.0; n]; 7],
            tmp: vec![0.0; n],
        }
    }

    /// One step of size `h` from `x`; writes the fifth- and fourth-order
    /// solutions. `k[0]` must already hold `f(x)`.
    fn step(&mut self, x: &[f64], h: f64, x5: &mut [f64], x4: &mut [f64]) {
        let n = x.len();
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, a) in A[s].iter().enumerate().take(s) {
                    acc += a * self.k[j][i];
                }
                self.tmp[i] = x[i] + h * acc;
            }
            self.f.eval_into(&self.tmp, &mut self.k[s]);
        }
        for i in 0..n {
            let mut s5 = 0.0;
            let mut s4 = 0.0;
            for s in 0..7 {
                s5 += B5[s] * self.k[s][i];
                s4 += B4[s] * self.k[s][i];
            }
            x5[i] = x[i] + h * s5;
            x4[i] = x[i] + h * s4;
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Adaptive Dormand-Prince 5(4) integration of `x' = f(x)` from `x0` at `t = 0`.
/// Every accepted step is recorded.
pub fn integrate(field: &VectorField, x0: &[f64], cfg: &SimConfig) -> Result<Trajectory> {
    check_dim(field.nvars(), x0.len())?;
    cfg.validate()?;
    Ok(integrate_compiled(&CompiledField::new(field), x0, cfg))
}

pub fn integrate_compiled(f: &CompiledField, x0: &[f64], cfg: &SimConfig) -> Trajectory {
    let n = x0.len();
    let mut st = Stepper::new(f);
    let mut x = x0.to_vec();
    let mut x5 = vec![0.0; n];
    let mut x4 = vec![0.0; n];
    let mut t = 0.0;
    let mut h = cfg.initial_step.min(cfg.t_end);
    let mut times = vec![0.0];
    let mut states = vec![x.clone()];
    let mut small = 0;
    let finish = |times, states, terminal| Trajectory {
        times,
        states,
        terminal,
    };
    if x.iter().any(|v| !v.is_finite()) {
        return finish(times, states, Terminal::Escaped { non_finite: true });
    }
    if norm(&x) > cfg.blowup_radius {
        return finish(times, states, Terminal::Escaped { non_finite: false });
    }
    f.eval_into(&x, &mut st.k[0]);
    let mut attempts = 0;
    while t < cfg.t_end {
        if attempts >= cfg.max_steps {
            return finish(times, states, Terminal::MaxSteps);
        }
        attempts += 1;
        let last = t + h >= cfg.t_end;
        if last {
            h = cfg.t_end - t;
        }
        st.step(&x, h, &mut x5, &mut x4);
        let mut err = 0.0f64;
        for i in 0..n {
            let sc = cfg.abs_tol + cfg.rel_tol * x[i].abs().max(x5[i].abs());
            let e = ((x5[i] - x4[i]) / sc).abs();
            // f64::max drops NaN
            err = if e.is_nan() { f64::INFINITY } else { err.max(e) };
        }
        if !err.is_finite() {
            if h < 1e-300 {
                times.push(t + h);
                states.push(x5.clone());
                return finish(times, states, Terminal::Escaped { non_finite: true });
            }
            h *= 0.1;
            continue;
        }
        if err <= 1.0 {
            t = if last { cfg.t_end } else { t + h };
            x.copy_from_slice(&x5);
            times.push(t);
            states.push(x.clone());
            // first-same-as-last: the seventh stage is f at the new point
            let k6 = st.k[6].clone();
            st.k[0] = k6;
            let r = norm(&x);
            if !r.is_finite() {
                return finish(times, states, Terminal::Escaped { non_finite: true });
            }
            if r > cfg.blowup_radius {
                return finish(times, states, Terminal::Escaped { non_finite: false });
            }
            if r < CONVERGED_RADIUS {
                small += 1;
                if small >= CONVERGED_STEPS {
                    return finish(times, states, Terminal::Converged);
                }
            } else {
                small = 0;
            }
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < 1e-14 * t.abs().max(1.0) {
            return finish(times, states, Terminal::MaxSteps);
        }
    }
    finish(times, states, Terminal::TimeLimit)
}

/// Which solution of the embedded pair a fixed-step run propagates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Four,
    Five,
}

/// `steps` equal steps of size `h` without error control; returns the final state.
pub fn integrate_fixed(field: &VectorField, x0: &[f64], h: f64, steps: usize, order: Order) -> Result<Vec<f64>> {
    check_dim(field.nvars(), x0.len())?;
    let f = CompiledField::new(field);
    let mut st = Stepper::new(&f);
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut x5 = vec![0.0; n];
    let mut x4 = vec![0.0; n];
    for _ in 0..steps {
        f.eval_into(&x, &mut st.k[0]);
        st.step(&x, h, &mut x5, &mut x4);
        match order {
            Order::Four => x.copy_from_slice(&x4),
            Order::Five => x.copy_from_slice(&x5),
        }
    }
    Ok(x)
}

/// Integrates from each initial condition, spreading the work over threads.
pub fn integrate_batch(field: &VectorField, x0s: &[Vec<f64>], cfg: &SimConfig) -> Result<Vec<Trajectory>> {
    for x0 in x0s {
        check_dim(field.nvars(), x0.len())?;
    }
    cfg.validate()?;
    let f = CompiledField::new(field);
    let threads = thread::available_parallelism().map_or(1, |t| t.get()).min(x0s.len().max(1));
    let chunk = x0s.len().div_ceil(threads).max(1);
    let f = &f;
    Ok(thread::scope(|s| {
        let handles: Vec<_> = x0s
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|x0| integrate_compiled(f, x0, cfg)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    }))
}
