use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::integrate::{CompiledPoly, Trajectory};
use crate::error::{check_dim, Error, Result};
use crate::poly::rational::int;
use crate::poly::{Rational, VectorField};
use crate::reductions::{Halfspace, ENUMERATION_CAP};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Monotonicity {
    Monotone,
    /// `V` rose by `delta` between samples `index - 1` and `index`.
    Violation { index: usize, delta: f64 },
}

impl Monotonicity {
    pub fn is_monotone(&self) -> bool {
        matches!(self, Monotonicity::Monotone)
    }
}

/// Checks that `V` is nonincreasing sample to sample, allowing a rise of
/// `1e-7 (1 + |V|)`.
pub fn lyapunov_monotonic(v: &crate::poly::Polynomial, traj: &Trajectory) -> Result<Monotonicity> {
    if !traj.is_empty() {
        check_dim(v.nvars(), traj.nvars())?;
    }
    let vc = CompiledPoly::new(v);
    let mut prev: Option<f64> = None;
    for (k, x) in traj.states.iter().enumerate() {
        let cur = vc.eval(x);
        if let Some(p) = prev {
            let delta = cur - p;
            if delta > 1e-7 * (1.0 + p.abs()) || !cur.is_finite() {
                return Ok(Monotonicity::Violation { index: k, delta });
            }
        }
        prev = Some(cur);
    }
    Ok(Monotonicity::Monotone)
}

/// All points of `{0,1}^n` where `f` vanishes exactly. With `augmented` the
/// last coordinate is held at 1 and only the others range over `{0,1}`.
pub fn boolean_equilibria(field: &VectorField, augmented: bool) -> Result<Vec<Vec<Rational>>> {
    let n = field.nvars();
    let free = if augmented { n - 1 } else { n };
    if free > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            nvars: free,
            cap: ENUMERATION_CAP,
        });
    }
    // a monomial evaluates to 1 on a boolean point exactly when its support
    // (restricted to the free coordinates) is switched on
    let comps: Vec<Vec<(u32, Rational)>> = field
        .components()
        .iter()
        .map(|c| {
            c.terms()
                .map(|(m, coef)| {
                    let support = m.exponents()[..free]
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .fold(0u32, |acc, (i, _)| acc | (1 << i));
                    (support, coef.clone())
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for mask in 0..(1u64 << free) as u32 {
        let zero = comps.iter().all(|terms| {
            let mut acc = Rational::zero();
            for (s, c) in terms {
                if s & mask == *s {
                    acc += c;
                }
            }
            acc.is_zero()
        });
        if zero {
            let mut pt: Vec<Rational> = (0..free).map(|i| int(((mask >> i) & 1) as i64)).collect();
            if augmented {
                pt.push(int(1));
            }
            out.push(pt);
        }
    }
    Ok(out)
}

/// Index of the first sample inside the intersection of the halfspaces.
pub fn polytope_membership(traj: &Trajectory, set: &[Halfspace]) -> Option<usize> {
    traj.states
        .iter()
        .position(|x| set.iter().all(|h| h.contains_f64(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::integrate::{integrate, SimConfig, Terminal};
    use crate::poly::{parse_polynomial, parse_vector_field};
    use crate::reductions::obstacle_polytope;

    fn decay_traj() -> Trajectory {
        let f = parse_vector_field("dx1 = -x1").unwrap();
        let cfg = SimConfig {
            t_end: 5.0,
            ..Default::default()
        };
        integrate(&f, &[1.5], &cfg).unwrap()
    }

    #[test]
    fn monotone_and_violation() {
        let tr = decay_traj();
        let v = parse_polynomial("x1^2", Some(1)).unwrap();
        assert!(lyapunov_monotonic(&v, &tr).unwrap().is_monotone());
        let w = parse_polynomial("-x1^2", Some(1)).unwrap();
        match lyapunov_monotonic(&w, &tr).unwrap() {
            Monotonicity::Violation { index, delta } => {
                assert_eq!(index, 1);
                assert!(delta > 0.0);
            }
            m => panic!("{m:?}"),
        }
    }

    #[test]
    fn linear_decay_has_only_origin() {
        let f = parse_vector_field("dx1 = -x1\ndx2 = -x2\ndx3 = -x3").unwrap();
        let eq = boolean_equilibria(&f, false).unwrap();
        assert_eq!(eq, vec![vec![int(0), int(0), int(0)]]);
    }

    #[test]
    fn augmented_enumeration_fixes_last_coordinate() {
        // zero at (1, 0, 1): x1 x3 - x3, x2
        let f = parse_vector_field("dx1 = x1*x3 - x3\ndx2 = x2\ndx3 = x2*x3").unwrap();
        let eq = boolean_equilibria(&f, true).unwrap();
        assert_eq!(eq, vec![vec![int(1), int(0), int(1)]]);
    }

    fn ray(start: f64) -> Trajectory {
        // x' = x along the diagonal
        let f = parse_vector_field("dx1 = x1\ndx2 = x2").unwrap();
        let cfg = SimConfig {
            t_end: 3.0,
            ..Default::default()
        };
        integrate(&f, &[start, start], &cfg).unwrap()
    }

    #[test]
    fn ray_hits_obstacle() {
        let tr = ray(0.05);
        let k = polytope_membership(&tr, &obstacle_polytope(2)).unwrap();
        let x = &tr.states[k];
        assert!(x[0] + x[1] >= 1.0 && x[0] + x[1] <= 2.0);
        assert!(tr.states[..k].iter().all(|x| x[0] + x[1] < 1.0));
    }

    #[test]
    fn confined_trajectory_misses_obstacle() {
        let f = parse_vector_field("dx1 = -x2 - x1\ndx2 = x1 - x2").unwrap();
        let tr = integrate(&f, &[0.3, 0.2], &SimConfig::default()).unwrap();
        assert_eq!(tr.terminal, Terminal::Converged);
        assert!(tr.states.iter().all(|x| x[0].hypot(x[1]) < 0.4));
        assert_eq!(polytope_membership(&tr, &obstacle_polytope(2)), None);
        assert_eq!(polytope_membership(&tr, &[]), Some(0));
    }
}
