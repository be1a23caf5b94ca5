//! Exact sparse multivariate polynomials over the rationals.
//!
//! Everything symbolic in this crate (vector fields, Lie brackets, switching
//! function entries) lives here, so a bracket that is "identically zero" is a
//! decidable, exact fact rather than a tolerance test.

mod compiled;
mod poly;
mod polyvec;
mod rational;
mod text;

pub use compiled::{CompiledPoly, CompiledVec};
pub use poly::{Monomial, Poly};
pub use polyvec::PolyVec;
pub use rational::{parse_rational, rat, rational_from_f64, rational_to_f64, Rational};
pub use text::{parse_poly, parse_poly_with_names, render_poly_with_names};

use thiserror::Error;

/// Errors raised by polynomial construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("variable-count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    VarIndex { index: usize, nvars: usize },
    #[error("point has {got} coordinates, expected {expected}")]
    PointLength { expected: usize, got: usize },
    #[error("exponent vector has length {got}, expected {expected}")]
    ExponentLength { expected: usize, got: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: alloc::string::String },
}
