//! Exact scalars, Laurent polynomials in t, and a truncated graded ring of
//! psi and Chern classes.

mod graded;
mod laurent;
pub mod scalar;

pub use graded::{Bundle, GradedClass, Monomial, Sign, Symbol};
pub use laurent::Laurent;
pub use scalar::Scalar;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatError {
    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: u32, right: u32 },
    #[error("unsupported Chern parameter {0}: must be a single term in t")]
    UnsupportedParameter(String),
    #[error("{0} is not a unit")]
    NotAUnit(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-equivariant limit does not exist: term {monomial} carries t^{t_exp}")]
    NegativeTPower { monomial: String, t_exp: i64 },
    #[error("cannot parse {0}")]
    Parse(String),
}
