//! Geometric analysis of the switching functions: Lie brackets, the
//! derivative ladder and its `A`/`B` matrices, the generalized
//! Legendre–Clebsch test, the first Pontryagin cone `Δ`, and the chattering
//! certificate built on top of them.
//!
//! Brackets use `[a, b] = (Db) a - (Da) b`, which makes
//! `d/dt <p, h> = <p, [f, h] + Σ u_i [g_i, h]>` along extremals.

mod bracket;
mod certificate;
mod cone;
mod decide;
mod glc;
mod ladder;
mod parity;

pub use bracket::{ad_ladder, lie_bracket, lie_derivative_identity, pairing_poly, BracketField, BracketWord, LieDerivative};
pub use certificate::{fuller_certificate, fuller_certificate_at, Certificate, CertificateReport, FailedHypothesis};
pub use cone::{
    delta_basis, delta_basis_to_depth, delta_membership, delta_membership_exact, delta_rank, exact_cone, singular_necessary, ConeAtPoint, DeltaReport, ExactCone,
    DEFAULT_RANK_TOL,
};
pub use decide::{classify_tags, delta_inverse_decidable, Decidability, DecidabilityReport, EntryTag};
pub use glc::{glc_check, glc_classify, GlcVerdict, DEFAULT_EIG_TOL};
pub use ladder::{ab_matrices, LadderReport, DEFAULT_MAX_DEPTH};
pub use parity::{parity_oracle, AValue, JunctionConclusion, JunctionVerdict};

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::polyalg::PolyError;
use crate::system::SystemError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("no input appears in the switching-function derivatives up to depth {max_depth}")]
    OrderUndetected { max_depth: usize },
    #[error("mixed ladder at level {level}: rows {zero_rows:?} of B are identically zero while {witness} is not")]
    MixedLadder { level: usize, zero_rows: Vec<usize>, witness: String },
    #[error("ladder depth must be at least 1")]
    ZeroDepth,
    #[error("{0}")]
    Inapplicable(&'static str),
    #[error("{what} has length {got}, expected {expected}")]
    Dim { what: &'static str, expected: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    System(#[from] SystemError),
}
