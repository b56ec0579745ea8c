//! Exact computation of r-spin Hurwitz numbers.
//!
//! The crate has three independent routes to the same numbers:
//!
//! - [`localize`] builds the torus-localization contributions as classes in a
//!   truncated graded ring and assembles the equivariant Hurwitz class;
//! - [`elsv`] evaluates the r-ELSV formula against intersection tables;
//! - [`hurwitz`] is a character-theoretic and brute-force oracle that never
//!   touches the graded ring.
//!
//! All arithmetic is exact.

pub mod charsym;
pub mod combi;
pub mod elsv;
pub mod hurwitz;
pub mod localize;
pub mod ratcore;

pub use ratcore::Scalar;
