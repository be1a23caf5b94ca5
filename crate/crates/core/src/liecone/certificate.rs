use alloc::vec::Vec;

use super::cone::{delta_basis, delta_basis_to_depth, delta_membership_exact, delta_rank, exact_cone, DeltaReport, DEFAULT_RANK_TOL};
use super::decide::{delta_inverse_decidable, Decidability, DecidabilityReport};
use super::ladder::{ab_matrices, LadderReport, DEFAULT_MAX_DEPTH};
use super::LieError;
use crate::polyalg::{rational_to_f64, Rational};
use crate::system::AugmentedSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Even order, `ad_f^(2q) g_i ∈ Δ` for all inputs and `B` is
    /// Δ-inverse-decidable: the junction chatters.
    Fuller,
    Inconclusive,
    /// `Δ` is the whole space at the candidate point.
    NoSingularArc,
}

/// The first hypothesis of the chattering certificate that failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailedHypothesis {
    OddLadderIndex { k: usize },
    OddProblemOrder { q: usize },
    RungOutsideCone { input: usize },
    NotInvertible(Decidability),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateReport {
    pub verdict: Certificate,
    pub failed: Option<FailedHypothesis>,
    /// Absent only when the cone already fills the space and the ladder
    /// never reached the controls.
    pub ladder: Option<LadderReport>,
    pub delta: DeltaReport,
    pub decidability: Option<DecidabilityReport>,
    pub candidate: Vec<Rational>,
}

/// [`fuller_certificate_at`] with the origin as candidate singular point.
pub fn fuller_certificate(aug: &AugmentedSystem) -> Result<CertificateReport, LieError> {
    let origin = alloc::vec![Rational::from_integer(0.into()); aug.dim()];
    fuller_certificate_at(aug, &origin, DEFAULT_MAX_DEPTH)
}

/// Runs the ladder, the cone at `candidate` (exactly and numerically),
/// the membership test for the `A` rungs and the Δ-inverse-decidability of
/// `B`, stopping at the first failing hypothesis.
pub fn fuller_certificate_at(aug: &AugmentedSystem, candidate: &[Rational], max_depth: usize) -> Result<CertificateReport, LieError> {
    let ladder = ab_matrices(aug, max_depth);
    let basis = match &ladder {
        Ok(report) => delta_basis(aug, report),
        Err(LieError::OrderUndetected { .. }) => delta_basis_to_depth(aug, max_depth)?,
        Err(e) => return Err(e.clone()),
    };
    let point: Vec<f64> = candidate.iter().map(rational_to_f64).collect();
    let mut delta = delta_rank(&basis, &[point], DEFAULT_RANK_TOL)?;
    let exact = exact_cone(&basis, candidate)?;
    let full = exact.rank == aug.dim();
    delta.exact = Some(exact);

    let done = |verdict, failed, ladder, delta, decidability| CertificateReport {
        verdict,
        failed,
        ladder,
        delta,
        decidability,
        candidate: candidate.to_vec(),
    };
    if full {
        return Ok(done(Certificate::NoSingularArc, None, ladder.ok(), delta, None));
    }
    let ladder = ladder?;
    let Some(q) = ladder.q else {
        let failed = FailedHypothesis::OddLadderIndex { k: ladder.k };
        return Ok(done(Certificate::Inconclusive, Some(failed), Some(ladder), delta, None));
    };
    if q % 2 == 1 {
        return Ok(done(Certificate::Inconclusive, Some(FailedHypothesis::OddProblemOrder { q }), Some(ladder), delta, None));
    }
    let mut outside = None;
    for (input, a) in ladder.a_fields.iter().enumerate() {
        delta.query(a)?;
        let cone = delta.exact.as_ref().expect("set above");
        if !delta_membership_exact(&a.field, cone)? && outside.is_none() {
            outside = Some(input);
        }
    }
    if let Some(input) = outside {
        return Ok(done(Certificate::Inconclusive, Some(FailedHypothesis::RungOutsideCone { input }), Some(ladder), delta, None));
    }
    let decidability = delta_inverse_decidable(&ladder, &delta)?;
    if decidability.verdict != Decidability::Invertible {
        let failed = FailedHypothesis::NotInvertible(decidability.verdict);
        return Ok(done(Certificate::Inconclusive, Some(failed), Some(ladder), delta, Some(decidability)));
    }
    Ok(done(Certificate::Fuller, None, Some(ladder), delta, Some(decidability)))
}
