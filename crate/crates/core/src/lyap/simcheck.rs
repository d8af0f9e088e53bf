use crate::dynamics::{integrate_batch, lyapunov_monotonic, Monotonicity, SimConfig, Terminal};
use crate::error::Result;
use crate::poly::{Polynomial, VectorField};

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut i: u32, base: u32) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// `count` deterministic points spread over the ball of the given radius
/// (a Halton cube squeezed into the inscribed ball).
pub fn sample_points(nvars: usize, count: usize, radius: f64) -> Vec<Vec<f64>> {
    let scale = radius / (nvars as f64).sqrt();
    (1..=count as u32)
        .map(|i| {
            (0..nvars)
                .map(|d| (2.0 * radical_inverse(i, PRIMES[d % PRIMES.len()]) - 1.0) * scale)
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct TrajectoryCheck {
    pub initial: Vec<Vec<f64>>,
    pub results: Vec<(Monotonicity, Terminal)>,
}

impl TrajectoryCheck {
    pub fn all_monotone(&self) -> bool {
        self.results.iter().all(|(m, _)| m.is_monotone())
    }
}

/// Simulates `count` trajectories from the unit ball and checks that `v`
/// never increases along them.
pub fn trajectory_check(v: &Polynomial, field: &VectorField, count: usize, cfg: &SimConfig) -> Result<TrajectoryCheck> {
    let initial = sample_points(field.nvars(), count, 1.0);
    let trajs = integrate_batch(field, &initial, cfg)?;
    let results = trajs
        .iter()
        .map(|t| Ok((lyapunov_monotonic(v, t)?, t.terminal)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrajectoryCheck { initial, results })
}
