//! Sum-of-squares programs: Gram bases, SDP compilation, certificates and
//! exact rational rounding.

pub mod basis;
pub mod certificate;
pub mod check;
pub mod program;

pub use basis::{monomial_basis, newton_basis, BasisMode, GramBasis};
pub use certificate::{gram_polynomial, square_certificate, CertificateJson, GramMatrix, SosCertificate};
pub use check::{
    check_sos, check_sos_with, compile_sos, extract_decomposition, rationalize_certificate,
    rationalize_with_schedule, NotSosEvidence, SosVerdict,
};
pub use program::{rationalize_blocks, rationalize_schedule, strictly_interior, ExactConstraint, GramProgram, Projector};
