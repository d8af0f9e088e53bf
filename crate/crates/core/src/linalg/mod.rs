//! Dense symmetric matrices, eigenvalues, exact PSD checks and the SDP solver.

pub mod eig;
pub mod exact;
pub mod ipm;
pub mod sdp;
pub mod sym;

pub use eig::{eig_min, symmetric_eigen};
pub use exact::{hurwitz_test, lyapunov_equation, psd_check_exact, LyapunovAnswer, PsdVerdict};
pub use ipm::solve_sdp;
pub use sdp::{Constraint, Residuals, SdpProblem, SdpSolution, SdpStatus, SolverOptions, SparseEntry};
pub use sym::SymMatrix;
