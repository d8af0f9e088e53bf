//! Polynomial Lyapunov analysis: sum-of-squares search through semidefinite
//! programming, exact certificate checking, and the 3SAT-based hardness
//! instances for stability of cubic vector fields.

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod lyap;
pub mod poly;
pub mod reductions;
pub mod sos;

pub use error::{Error, ParseError, Result};
pub use poly::{lie_derivative, Monomial, Polynomial, Rational, VectorField};
