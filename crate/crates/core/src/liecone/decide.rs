use alloc::vec::Vec;

use super::cone::{delta_membership, delta_membership_exact, DeltaReport};
use super::ladder::LadderReport;
use super::LieError;
use crate::linalg::poly_det;
use crate::polyalg::{Poly, Rational};

/// What can be certified about one entry `<p, v_ij>` of a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryTag {
    /// `v_ij ∈ Δ`, so the entry vanishes on a singular arc.
    Zero,
    /// With the adjoint fixed by the annihilator the entry is this constant.
    Constant(Rational),
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decidability {
    Invertible,
    Singular,
    Undecidable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecidabilityReport {
    pub tags: Vec<Vec<EntryTag>>,
    /// Determinant with one variable per unknown entry (row-major order).
    pub determinant: Poly,
    pub verdict: Decidability,
}

/// Forms the determinant over the tags, treating each unknown entry as an
/// independent indeterminate.
pub fn classify_tags(tags: &[Vec<EntryTag>]) -> (Poly, Decidability) {
    let unknowns = tags.iter().flatten().filter(|t| matches!(t, EntryTag::Unknown)).count();
    let mut next = 0;
    let matrix: Vec<Vec<Poly>> = tags
        .iter()
        .map(|row| {
            row.iter()
                .map(|t| match t {
                    EntryTag::Zero => Poly::zero(unknowns),
                    EntryTag::Constant(c) => Poly::constant(unknowns, c.clone()),
                    EntryTag::Unknown => {
                        next += 1;
                        Poly::var(unknowns, next - 1).expect("counted unknowns")
                    }
                })
                .collect()
        })
        .collect();
    let det = poly_det(&matrix, unknowns);
    let verdict = if det.is_zero() {
        Decidability::Singular
    } else if det.is_constant() {
        Decidability::Invertible
    } else {
        Decidability::Undecidable
    };
    (det, verdict)
}

/// Tags each `B` entry as zero (field in `Δ`), constant (pairing with the
/// exact annihilator is a constant polynomial), or unknown, then decides
/// invertibility from the tags alone.
///
/// Membership uses the exact cone when `delta.exact` is present and the
/// numerical sample points otherwise. Constant detection needs the exact
/// annihilator, which exists only when the exact rank is `N - 1`.
pub fn delta_inverse_decidable(report: &LadderReport, delta: &DeltaReport) -> Result<DecidabilityReport, LieError> {
    let annihilator = delta.exact.as_ref().and_then(|e| e.annihilator.as_ref());
    let mut tags = Vec::with_capacity(report.b_fields.len());
    for row in &report.b_fields {
        let mut tag_row = Vec::with_capacity(row.len());
        for b in row {
            let member = match &delta.exact {
                Some(cone) => delta_membership_exact(&b.field, cone)?,
                None => delta_membership(&b.field, delta)?,
            };
            let tag = if member {
                EntryTag::Zero
            } else if let Some(p) = annihilator {
                let e = b.field.dot_constant(p)?;
                if e.is_constant() {
                    EntryTag::Constant(e.constant_term())
                } else {
                    EntryTag::Unknown
                }
            } else {
                EntryTag::Unknown
            };
            tag_row.push(tag);
        }
        tags.push(tag_row);
    }
    let (determinant, verdict) = classify_tags(&tags);
    Ok(DecidabilityReport { tags, determinant, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::rat;
    use alloc::vec;

    #[test]
    fn constant_nonsingular_is_invertible() {
        let tags = vec![vec![EntryTag::Constant(rat(2, 1)), EntryTag::Zero], vec![EntryTag::Unknown, EntryTag::Constant(rat(-1, 3))]];
        let (det, verdict) = classify_tags(&tags);
        assert_eq!(verdict, Decidability::Invertible);
        assert_eq!(det.constant_term(), rat(-2, 3));
    }

    #[test]
    fn zero_row_is_singular() {
        let tags = vec![vec![EntryTag::Zero, EntryTag::Zero], vec![EntryTag::Unknown, EntryTag::Constant(rat(1, 1))]];
        assert_eq!(classify_tags(&tags).1, Decidability::Singular);
    }

    #[test]
    fn unknown_off_diagonal_is_undecidable() {
        let tags = vec![vec![EntryTag::Zero, EntryTag::Unknown], vec![EntryTag::Constant(rat(1, 1)), EntryTag::Zero]];
        let (det, verdict) = classify_tags(&tags);
        assert_eq!(verdict, Decidability::Undecidable);
        assert_eq!(det.degree(), 1);
    }
}
