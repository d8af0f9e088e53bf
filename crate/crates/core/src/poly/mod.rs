//! Exact polynomial arithmetic over the rationals.

mod field;
mod monomial;
mod parse;
mod polynomial;
pub mod rational;
mod univariate;

pub use field::{lie_derivative, norm_squared, power_sum, VectorField};
pub use monomial::Monomial;
pub use parse::{parse_polynomial, parse_vector_field};
pub use polynomial::{ArithOp, Polynomial};
pub use rational::Rational;
pub use univariate::{binary_form_nonnegative, binary_form_positive_definite, UniPoly};
