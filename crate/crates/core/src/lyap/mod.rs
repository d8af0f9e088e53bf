//! Lyapunov function search, degree sweeps, the converse power search and
//! local stability tests.

pub mod converse;
pub mod local;
pub mod search;
pub mod simcheck;

pub use converse::{converse_power_search, converse_power_search_with, power_product, square_lyapunov, verify_power, PowerAttempt, PowerSearch};
pub use local::{gradient_quadratic_check, local_exp_stability, GradientCheck, GradientVerdict};
pub use search::{
    coefficient_distance, degree_sweep, normalize, search_sos_lyapunov, search_sos_lyapunov_with,
    InfeasibilityCertificate, LyapunovCertificate, LyapunovProblem, LyapunovResult, SweepConfig,
};
pub use simcheck::{sample_points, trajectory_check, TrajectoryCheck};
