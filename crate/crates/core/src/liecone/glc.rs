use alloc::vec::Vec;

use super::ladder::LadderReport;
use super::LieError;
use crate::linalg::symmetric_eigenvalues;

pub const DEFAULT_EIG_TOL: f64 = 1e-9;

/// Outcome of the generalized Legendre–Clebsch test on `(-1)^q B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlcVerdict {
    /// Negative definite (the strict condition).
    Strict,
    /// Negative semidefinite but not definite.
    Semidefinite,
    Violated,
}

impl GlcVerdict {
    /// Whether the (non-strict) semidefinite condition holds.
    pub fn satisfies_semidefinite(self) -> bool {
        matches!(self, GlcVerdict::Strict | GlcVerdict::Semidefinite)
    }
}

/// Classifies the symmetric part of `(-1)^q B`. Eigenvalues within
/// `tol * max(1, max|λ|)` of zero count as zero.
pub fn glc_classify(b: &[Vec<f64>], q: usize, tol: f64) -> GlcVerdict {
    let n = b.len();
    let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
    let sym: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| sign * 0.5 * (b[i][j] + b[j][i])).collect()).collect();
    let ev = symmetric_eigenvalues(&sym);
    let scale = ev.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let eps = tol * scale;
    if ev.iter().all(|&e| e < -eps) {
        GlcVerdict::Strict
    } else if ev.iter().all(|&e| e <= eps) {
        GlcVerdict::Semidefinite
    } else {
        GlcVerdict::Violated
    }
}

/// Evaluates `B(z, p)` and applies [`glc_classify`] with [`DEFAULT_EIG_TOL`].
pub fn glc_check(report: &LadderReport, z: &[f64], p: &[f64]) -> Result<GlcVerdict, LieError> {
    let q = report.q.ok_or(LieError::Inapplicable("the Legendre–Clebsch test needs an even ladder index"))?;
    let b = report.b_at(z, p)?;
    Ok(glc_classify(&b, q, DEFAULT_EIG_TOL))
}
