use alloc::vec::Vec;

use super::LieError;

/// `A(t_c)` for the junction tests: either known to vanish identically or a
/// numerical vector.
#[derive(Clone, Debug, PartialEq)]
pub enum AValue {
    SymbolicZero,
    Vector(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JunctionConclusion {
    AnalyticPossible,
    NonAnalyticForced,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JunctionVerdict {
    pub q: usize,
    /// Lowest discontinuous control derivative, if known.
    pub r: Option<usize>,
    /// `q + r` odd; `None` when `r` is unknown.
    pub parity_ok: Option<bool>,
    /// `q` even and `A + K B v ≠ 0` for every `v ∈ {-1, 1}^m`.
    pub corollary1: bool,
    /// `q` even and `A ≡ 0`.
    pub corollary2: bool,
    pub conclusion: JunctionConclusion,
}

/// Junction-order parity test. An analytic junction of order `q` whose
/// control has its first discontinuity in derivative `r` must have `q + r`
/// odd; for even `q`, a vanishing `A` or an `A + K B v` that misses zero on
/// every vertex of the control box forces a discontinuous control, hence a
/// non-analytic junction. `tol` decides when `A + K B v` counts as zero.
pub fn parity_oracle(q: usize, r: Option<usize>, a: &AValue, b: &[Vec<f64>], k: f64, tol: f64) -> Result<JunctionVerdict, LieError> {
    if q == 0 {
        return Err(LieError::Inapplicable("problem order must be at least 1"));
    }
    let m = b.len();
    if let AValue::Vector(v) = a {
        if v.len() != m {
            return Err(LieError::Dim { what: "A", expected: m, got: v.len() });
        }
    }
    let even = q % 2 == 0;
    let parity_ok = r.map(|r| (q + r) % 2 == 1);
    let corollary2 = even && matches!(a, AValue::SymbolicZero);
    let corollary1 = even && m > 0 && (0..1u64 << m).all(|mask| {
        (0..m).any(|i| {
            let mut s = match a {
                AValue::SymbolicZero => 0.0,
                AValue::Vector(v) => v[i],
            };
            for (j, bij) in b[i].iter().enumerate() {
                let vj = if mask >> j & 1 == 1 { 1.0 } else { -1.0 };
                s += k * bij * vj;
            }
            s.abs() > tol
        })
    });
    let forced = corollary1 || corollary2 || parity_ok == Some(false);
    Ok(JunctionVerdict {
        q,
        r,
        parity_ok,
        corollary1,
        corollary2,
        conclusion: if forced { JunctionConclusion::NonAnalyticForced } else { JunctionConclusion::AnalyticPossible },
    })
}
