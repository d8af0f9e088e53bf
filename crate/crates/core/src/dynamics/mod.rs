//! Numerical simulation of polynomial vector fields and the checks built on
//! sampled trajectories.

mod analysis;
mod integrate;

pub use analysis::{boolean_equilibria, lyapunov_monotonic, polytope_membership, Monotonicity};
pub use integrate::{
    integrate, integrate_batch, integrate_compiled, integrate_fixed, CompiledField, CompiledPoly,
    Order, SimConfig, Terminal, Trajectory, CONVERGED_RADIUS, CONVERGED_STEPS,
};
