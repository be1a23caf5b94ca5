//! Singular-arc and chattering analysis for multi-input affine optimal
//! control problems.
//!
//! The crate is `no_std` (it needs `alloc`). Symbolic work is exact over the
//! rationals; numerical work (cone ranks, extremal integration, chatter fits)
//! is plain `f64`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod polyalg;
pub mod problems;
pub mod system;

pub mod liecone;
pub mod simulate;

mod linalg;
