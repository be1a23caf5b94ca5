use alloc::string::ToString;
use alloc::vec::Vec;

use super::bracket::{lie_bracket, pairing_poly, BracketField, BracketWord};
use super::LieError;
use crate::polyalg::{CompiledVec, Poly, Rational};
use crate::system::AugmentedSystem;

pub const DEFAULT_MAX_DEPTH: usize = 12;

/// The first level of the switching-function derivative ladder at which the
/// controls appear: `φ^(k) = A + B u` with
/// `A_i = <p, ad_f^k g_i>` and `B_ij = <p, [g_j, ad_f^(k-1) g_i]>`.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderReport {
    /// Augmented dimension `N`.
    pub dim: usize,
    pub k: usize,
    /// Problem order `k / 2`; `None` when `k` is odd.
    pub q: Option<usize>,
    /// Set when `k` is odd (possible for several inputs).
    pub odd_order: bool,
    /// `ladder[i][l] = ad_f^l g_i`, `l = 0..=k`.
    pub ladder: Vec<Vec<BracketField>>,
    pub a_fields: Vec<BracketField>,
    /// `b_fields[i][j] = [g_j, ad_f^(k-1) g_i]`.
    pub b_fields: Vec<Vec<BracketField>>,
    /// Every `[g_j, ad_f^l g_i]` with `l < k - 1` is the zero field.
    pub lower_b_identically_zero: bool,
}

/// Climbs the ladder until some `[g_j, ad_f^(k-1) g_i]` is not identically
/// zero.
pub fn ab_matrices(aug: &AugmentedSystem, max_depth: usize) -> Result<LadderReport, LieError> {
    if max_depth == 0 {
        return Err(LieError::ZeroDepth);
    }
    let m = aug.inputs();
    if m == 0 {
        return Err(LieError::OrderUndetected { max_depth });
    }
    // Rungs are added one level at a time so nothing above ad_f^k is built.
    let mut full: Vec<Vec<BracketField>> = aug
        .gbar()
        .iter()
        .enumerate()
        .map(|(input, g)| alloc::vec![BracketField { word: BracketWord::Ad { depth: 0, input }, field: g.clone() }])
        .collect();
    let climb = |full: &mut Vec<Vec<BracketField>>| -> Result<(), LieError> {
        for (input, rungs) in full.iter_mut().enumerate() {
            let depth = rungs.len();
            let field = lie_bracket(aug.fbar(), &rungs[depth - 1].field)?;
            rungs.push(BracketField { word: BracketWord::Ad { depth, input }, field });
        }
        Ok(())
    };
    for level in 1..=max_depth {
        let depth = level - 1;
        if full[0].len() <= depth {
            climb(&mut full)?;
        }
        let mut rows: Vec<Vec<BracketField>> = Vec::with_capacity(m);
        for input in 0..m {
            let inner = &full[input][depth].field;
            let row = aug
                .gbar()
                .iter()
                .enumerate()
                .map(|(outer, g)| Ok(BracketField { word: BracketWord::Mixed { outer, depth, input }, field: lie_bracket(g, inner)? }))
                .collect::<Result<Vec<_>, LieError>>()?;
            rows.push(row);
        }
        let zero_rows: Vec<usize> = (0..m).filter(|&i| rows[i].iter().all(|b| b.field.is_zero())).collect();
        if zero_rows.len() == m {
            continue;
        }
        if !zero_rows.is_empty() {
            let witness = rows.iter().flatten().find(|b| !b.field.is_zero()).map(|b| b.word.to_string()).unwrap_or_default();
            return Err(LieError::MixedLadder { level, zero_rows, witness });
        }
        let k = level;
        while full[0].len() <= k {
            climb(&mut full)?;
        }
        let ladder = full;
        let a_fields = ladder.iter().map(|r| r[k].clone()).collect();
        return Ok(LadderReport {
            dim: aug.dim(),
            k,
            q: (k % 2 == 0).then_some(k / 2),
            odd_order: k % 2 == 1,
            ladder,
            a_fields,
            b_fields: rows,
            lower_b_identically_zero: true,
        });
    }
    Err(LieError::OrderUndetected { max_depth })
}

impl LadderReport {
    pub fn inputs(&self) -> usize {
        self.a_fields.len()
    }

    /// `A` is the zero vector of polynomials.
    pub fn a_identically_zero(&self) -> bool {
        self.a_fields.iter().all(|a| a.field.is_zero())
    }

    fn check(&self, z: usize, p: usize) -> Result<(), LieError> {
        if z != self.dim {
            return Err(LieError::Dim { what: "z", expected: self.dim, got: z });
        }
        if p != self.dim {
            return Err(LieError::Dim { what: "p", expected: self.dim, got: p });
        }
        Ok(())
    }

    pub fn a_at(&self, z: &[f64], p: &[f64]) -> Result<Vec<f64>, LieError> {
        self.check(z.len(), p.len())?;
        Ok(self.a_fields.iter().map(|a| CompiledVec::new(&a.field).dot(p, z)).collect())
    }

    pub fn b_at(&self, z: &[f64], p: &[f64]) -> Result<Vec<Vec<f64>>, LieError> {
        self.check(z.len(), p.len())?;
        Ok(self.b_fields.iter().map(|row| row.iter().map(|b| CompiledVec::new(&b.field).dot(p, z)).collect()).collect())
    }

    /// Exact `B(z, p)` at a rational point.
    pub fn b_at_rational(&self, z: &[Rational], p: &[Rational]) -> Result<Vec<Vec<Rational>>, LieError> {
        self.check(z.len(), p.len())?;
        self.b_fields
            .iter()
            .map(|row| {
                row.iter()
                    .map(|b| {
                        let vals = b.field.eval_rational(z)?;
                        Ok(vals.iter().zip(p).map(|(w, pk)| w * pk).sum())
                    })
                    .collect()
            })
            .collect()
    }

    /// Entries of `A` as polynomials in `(z, p)`.
    pub fn a_polys(&self) -> Result<Vec<Poly>, LieError> {
        Ok(self.a_fields.iter().map(|a| pairing_poly(&a.field)).collect::<Result<_, _>>()?)
    }

    /// Entries of `B` as polynomials in `(z, p)`.
    pub fn b_polys(&self) -> Result<Vec<Vec<Poly>>, LieError> {
        Ok(self.b_fields.iter().map(|row| row.iter().map(|b| pairing_poly(&b.field)).collect::<Result<_, _>>()).collect::<Result<_, _>>()?)
    }
}
