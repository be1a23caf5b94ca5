use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use super::bracket::{ad_ladder, BracketField, BracketWord};
use super::ladder::LadderReport;
use super::LieError;
use crate::linalg::{rational_kernel, rational_rank, right_svd};
use crate::polyalg::{PolyVec, Rational};
use crate::system::AugmentedSystem;

/// Relative singular-value threshold for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// `[f, g_i, ad_f g_i, ..., ad_f^(k-1) g_i]`, taken from a computed ladder.
pub fn delta_basis(aug: &AugmentedSystem, report: &LadderReport) -> Vec<BracketField> {
    let mut basis = Vec::with_capacity(1 + report.k * report.inputs());
    basis.push(BracketField { word: BracketWord::Drift, field: aug.fbar().clone() });
    for depth in 0..report.k {
        for rungs in &report.ladder {
            basis.push(rungs[depth].clone());
        }
    }
    basis
}

/// Same cone generators up to an explicit depth, for systems whose ladder
/// never reaches the controls (or has no inputs at all).
pub fn delta_basis_to_depth(aug: &AugmentedSystem, depth: usize) -> Result<Vec<BracketField>, LieError> {
    let mut basis = alloc::vec![BracketField { word: BracketWord::Drift, field: aug.fbar().clone() }];
    if depth == 0 || aug.inputs() == 0 {
        return Ok(basis);
    }
    let ladder = ad_ladder(aug, depth)?;
    for d in 0..depth {
        for rungs in &ladder {
            basis.push(rungs[d].clone());
        }
    }
    Ok(basis)
}

/// Numerical cone data at one sample point.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeAtPoint {
    pub z: Vec<f64>,
    pub rank: usize,
    pub singular_values: Vec<f64>,
    /// Orthonormal basis of `Δ(z)`.
    pub span: Vec<Vec<f64>>,
    /// Direction orthogonal to `Δ(z)` when `rank == N - 1`, scaled so that
    /// `p[0] = -1` whenever its first component is nonzero.
    pub annihilator: Option<Vec<f64>>,
}

/// Exact cone data at a rational point.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactCone {
    pub point: Vec<Rational>,
    pub rank: usize,
    pub annihilator: Option<Vec<Rational>>,
    rows: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaReport {
    pub dim: usize,
    pub basis_words: Vec<BracketWord>,
    pub points: Vec<ConeAtPoint>,
    /// Largest rank over the sample points.
    pub rank: usize,
    /// Annihilator at the first sample point, when it has rank `N - 1`.
    pub annihilator: Option<Vec<f64>>,
    /// `rank == N`: the adjoint would have to vanish.
    pub no_singular_arc: bool,
    pub membership_queries: BTreeMap<String, bool>,
    pub exact: Option<ExactCone>,
    pub tol: f64,
}

fn check_point(dim: usize, z: usize) -> Result<(), LieError> {
    if z != dim {
        return Err(LieError::Dim { what: "sample point", expected: dim, got: z });
    }
    Ok(())
}

fn normalize_annihilator(v: &[f64]) -> Vec<f64> {
    let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
    if v[0].abs() > 1e-12 * norm {
        let s = -1.0 / v[0];
        return v.iter().map(|x| x * s).collect();
    }
    let lead = v.iter().copied().find(|x| x.abs() > 1e-12 * norm).unwrap_or(1.0);
    let s = lead.signum() / norm;
    v.iter().map(|x| x * s).collect()
}

fn cone_at(basis: &[BracketField], dim: usize, z: &[f64], tol: f64) -> Result<ConeAtPoint, LieError> {
    check_point(dim, z.len())?;
    let rows: Vec<Vec<f64>> = basis.iter().map(|b| b.field.eval_f64(z)).collect::<Result<_, _>>()?;
    let svd = right_svd(&rows, dim);
    let top = svd.singular_values.first().copied().unwrap_or(0.0);
    let rank = if top == 0.0 { 0 } else { svd.singular_values.iter().filter(|&&s| s > tol * top).count() };
    let span = svd.vectors[..rank].to_vec();
    let annihilator = (rank + 1 == dim).then(|| normalize_annihilator(&svd.vectors[dim - 1]));
    Ok(ConeAtPoint { z: z.to_vec(), rank, singular_values: svd.singular_values, span, annihilator })
}

/// Numerical rank of the cone generators at each sample point.
pub fn delta_rank(basis: &[BracketField], points: &[Vec<f64>], tol: f64) -> Result<DeltaReport, LieError> {
    let dim = basis.first().map(|b| b.field.dim()).ok_or(LieError::Inapplicable("empty cone basis"))?;
    if points.is_empty() {
        return Err(LieError::Inapplicable("delta_rank needs at least one sample point"));
    }
    let cones = points.iter().map(|z| cone_at(basis, dim, z, tol)).collect::<Result<Vec<_>, _>>()?;
    let rank = cones.iter().map(|c| c.rank).max().unwrap_or(0);
    Ok(DeltaReport {
        dim,
        basis_words: basis.iter().map(|b| b.word).collect(),
        annihilator: cones[0].annihilator.clone(),
        points: cones,
        rank,
        no_singular_arc: rank == dim,
        membership_queries: BTreeMap::new(),
        exact: None,
        tol,
    })
}

/// Exact rank and annihilator of the cone generators at a rational point.
pub fn exact_cone(basis: &[BracketField], point: &[Rational]) -> Result<ExactCone, LieError> {
    let dim = basis.first().map(|b| b.field.dim()).ok_or(LieError::Inapplicable("empty cone basis"))?;
    check_point(dim, point.len())?;
    let rows: Vec<Vec<Rational>> = basis.iter().map(|b| b.field.eval_rational(point)).collect::<Result<_, _>>()?;
    let rank = rational_rank(&rows);
    let annihilator = if rank + 1 == dim {
        let mut kernel = rational_kernel(&rows, dim);
        let mut v = kernel.pop().expect("one-dimensional kernel");
        let scale = if !v[0].is_zero() {
            -Rational::from_integer(1.into()) / v[0].clone()
        } else {
            let lead = v.iter().find(|x| !x.is_zero()).cloned().expect("nonzero kernel vector");
            Rational::from_integer(1.into()) / lead
        };
        for x in v.iter_mut() {
            *x *= scale.clone();
        }
        Some(v)
    } else {
        None
    };
    Ok(ExactCone { point: point.to_vec(), rank, annihilator, rows })
}

/// Whether `field` lies in `Δ` at every sample point of `delta`: the
/// residual of its orthogonal projection onto `Δ(z)` is at most
/// `tol * |field(z)|`.
pub fn delta_membership(field: &PolyVec, delta: &DeltaReport) -> Result<bool, LieError> {
    for cone in &delta.points {
        let w = field.eval_f64(&cone.z)?;
        let mut res = w.clone();
        for v in &cone.span {
            let c: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
            for (r, vk) in res.iter_mut().zip(v) {
                *r -= c * vk;
            }
        }
        let norm = |x: &[f64]| libm::sqrt(x.iter().map(|a| a * a).sum::<f64>());
        if norm(&res) > delta.tol * norm(&w) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact membership of `field(point)` in the span of the generators.
pub fn delta_membership_exact(field: &PolyVec, cone: &ExactCone) -> Result<bool, LieError> {
    let w = field.eval_rational(&cone.point)?;
    if w.iter().all(Zero::is_zero) {
        return Ok(true);
    }
    let mut rows = cone.rows.clone();
    rows.push(w);
    Ok(rational_rank(&rows) == cone.rank)
}

/// Necessary condition for `(z, p)` to lie on a singular arc:
/// `|<p, f>| <= tol` and `|φ_i| <= tol` for every input.
pub fn singular_necessary(aug: &AugmentedSystem, z: &[f64], p: &[f64], tol: f64) -> Result<bool, LieError> {
    let drift = aug.drift_pairing(z, p)?;
    let phi = aug.switching_vector(z, p)?;
    Ok(drift.abs() <= tol && phi.iter().all(|x| x.abs() <= tol))
}

impl DeltaReport {
    /// Runs [`delta_membership`] and records the answer under the field's
    /// word.
    pub fn query(&mut self, field: &BracketField) -> Result<bool, LieError> {
        let member = delta_membership(&field.field, self)?;
        self.membership_queries.insert(alloc::format!("{}", field.word), member);
        Ok(member)
    }
}
