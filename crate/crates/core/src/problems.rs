//! Built-in problem families: the classic Fuller problem, its multi-input
//! extension with matrices `M1`, `M2`, the mechanical (Hamiltonian) family
//! `ẋ = T v, v̇ = -∇Q(x) + M u` with cost `c(x)`, and the time-optimal double
//! integrator.
//!
//! States are ordered `(x_1..x_d, v_1..v_d)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::rational_det;
use crate::polyalg::{rat, Poly, PolyError, PolyVec, Rational};
use crate::system::{AffineSystem, SystemError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("{name} must be square, got {rows}x{cols}")]
    NotSquare { name: &'static str, rows: usize, cols: usize },
    #[error("{name} must be symmetric")]
    NotSymmetric { name: &'static str },
    #[error("{name} must be positive definite")]
    NotPositiveDefinite { name: &'static str },
    #[error("{name} must be invertible")]
    Singular { name: &'static str },
    #[error("matrix rows have unequal lengths")]
    Ragged,
    #[error("{0}")]
    Hypothesis(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    System(#[from] SystemError),
}

/// Dense rational matrix parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixParam {
    rows: Vec<Vec<Rational>>,
}

impl MatrixParam {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self, ProblemError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(ProblemError::Ragged);
        }
        Ok(MatrixParam { rows })
    }

    pub fn identity(n: usize) -> Self {
        MatrixParam {
            rows: (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, ProblemError> {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect())
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.rows[i][j]
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.nrows()).all(|i| (0..i).all(|j| self.rows[i][j] == self.rows[j][i]))
    }

    pub fn determinant(&self) -> Rational {
        rational_det(&self.rows)
    }

    /// Sylvester's criterion on the leading principal minors (exact).
    pub fn is_positive_definite(&self) -> bool {
        self.is_symmetric()
            && (1..=self.nrows()).all(|k| {
                let minor: Vec<Vec<Rational>> = self.rows[..k].iter().map(|r| r[..k].to_vec()).collect();
                rational_det(&minor) > Rational::zero()
            })
    }

    /// Matrix product; panics on incompatible shapes.
    pub fn mul(&self, other: &MatrixParam) -> MatrixParam {
        assert_eq!(self.ncols(), other.nrows(), "matrix product shape");
        let rows = (0..self.nrows())
            .map(|i| (0..other.ncols()).map(|j| (0..self.ncols()).map(|k| &self.rows[i][k] * &other.rows[k][j]).sum()).collect())
            .collect();
        MatrixParam { rows }
    }

    pub fn neg(&self) -> MatrixParam {
        MatrixParam { rows: self.rows.iter().map(|r| r.iter().map(|x| -x.clone()).collect()).collect() }
    }

    fn require_square(&self, name: &'static str) -> Result<usize, ProblemError> {
        if !self.is_square() {
            return Err(ProblemError::NotSquare { name, rows: self.nrows(), cols: self.ncols() });
        }
        Ok(self.nrows())
    }

    fn require_spd(&self, name: &'static str) -> Result<usize, ProblemError> {
        let n = self.require_square(name)?;
        if !self.is_symmetric() {
            return Err(ProblemError::NotSymmetric { name });
        }
        if !self.is_positive_definite() {
            return Err(ProblemError::NotPositiveDefinite { name });
        }
        Ok(n)
    }

    fn require_symmetric_invertible(&self, name: &'static str) -> Result<usize, ProblemError> {
        let n = self.require_square(name)?;
        if !self.is_symmetric() {
            return Err(ProblemError::NotSymmetric { name });
        }
        if self.determinant().is_zero() {
            return Err(ProblemError::Singular { name });
        }
        Ok(n)
    }
}

/// `(A y)` as polynomials, where `y` occupies variables `offset..offset+d`.
fn linear_map(a: &MatrixParam, nvars: usize, offset: usize) -> Vec<Poly> {
    (0..a.nrows())
        .map(|i| {
            let mut acc = Poly::zero(nvars);
            for j in 0..a.ncols() {
                let v = Poly::var(nvars, offset + j).expect("in range");
                acc = &acc + &v.scale(a.get(i, j));
            }
            acc
        })
        .collect()
}

/// Second-order mechanical structure `ẋ = T v`, `v̇ = force`, `u` entering
/// through `M`.
fn mechanical(t: &MatrixParam, m: &MatrixParam, force: Vec<Poly>, cost: Poly) -> Result<AffineSystem, ProblemError> {
    let d = t.nrows();
    let n = 2 * d;
    let mut f = linear_map(t, n, d);
    f.extend(force);
    let g = (0..d)
        .map(|i| {
            let mut col = vec![Poly::zero(n); d];
            col.extend((0..d).map(|r| Poly::constant(n, m.get(r, i).clone())));
            PolyVec::with_nvars(n, col)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let sys = AffineSystem::new(PolyVec::with_nvars(n, f)?, g, cost, vec![Poly::zero(n); d], Poly::one(1))?;
    Ok(sys)
}

fn half_norm_sq(d: usize, n: usize) -> Poly {
    let half = rat(1, 2);
    (0..d).fold(Poly::zero(n), |acc, i| {
        let x = Poly::var(n, i).expect("in range");
        &acc + &(&x * &x).scale(&half)
    })
}

/// Minimize `∫ x²/2` with `ẋ = v`, `v̇ = u`, `|u| ≤ 1`.
pub fn fuller_classic() -> AffineSystem {
    fuller_multi(&MatrixParam::identity(1), &MatrixParam::identity(1)).expect("identity parameters are valid")
}

/// Minimize `∫ |x|²/2` with `ẋ = M1 v`, `v̇ = M2 u`, `|u_i| ≤ 1`.
/// `M1` must be symmetric positive definite and `M2` symmetric invertible.
pub fn fuller_multi(m1: &MatrixParam, m2: &MatrixParam) -> Result<AffineSystem, ProblemError> {
    let d = m1.require_spd("M1")?;
    let d2 = m2.require_symmetric_invertible("M2")?;
    if d != d2 {
        return Err(ProblemError::Hypothesis(format!("M1 is {d}x{d} but M2 is {d2}x{d2}")));
    }
    let n = 2 * d;
    mechanical(m1, m2, vec![Poly::zero(n); d], half_norm_sq(d, n))
}

/// The mechanical family with potential `Q` and running cost `c`, both
/// polynomials in the `d` position variables.
///
/// Checked hypotheses: `T` symmetric positive definite, `M` symmetric
/// invertible, `∇Q(0) = 0`, `c(0) = 0`, `∇c(0) = 0`, `∇²c(0)` positive
/// definite. All checks are exact.
pub fn hamiltonian_family(t: &MatrixParam, m: &MatrixParam, q: &Poly, c: &Poly) -> Result<AffineSystem, ProblemError> {
    let d = t.require_spd("T")?;
    let dm = m.require_symmetric_invertible("M")?;
    if d != dm {
        return Err(ProblemError::Hypothesis(format!("T is {d}x{d} but M is {dm}x{dm}")));
    }
    for (name, p) in [("Q", q), ("c", c)] {
        if p.nvars() != d {
            return Err(ProblemError::Hypothesis(format!("{name} must be a polynomial in the {d} position variables, got {}", p.nvars())));
        }
    }
    let origin = vec![Rational::zero(); d];
    let c0 = c.eval_rational(&origin)?;
    if !c0.is_zero() {
        return Err(ProblemError::Hypothesis(format!(
            "c(0) = {c0} but c must vanish at the target: with c(0) != 0 the cone always fills the space and no singular arc is optimal"
        )));
    }
    let grad_c: Vec<Poly> = (0..d).map(|i| c.partial(i)).collect::<Result<_, _>>()?;
    if let Some(i) = (0..d).find(|&i| !grad_c[i].eval_rational(&origin).map(|v| v.is_zero()).unwrap_or(false)) {
        return Err(ProblemError::Hypothesis(format!("dc/dx{i}(0) != 0: the gradient of c must vanish at the origin")));
    }
    let hess: Vec<Vec<Rational>> = (0..d)
        .map(|i| (0..d).map(|j| grad_c[i].partial(j).and_then(|h| h.eval_rational(&origin))).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    if !MatrixParam::new(hess)?.is_positive_definite() {
        return Err(ProblemError::Hypothesis("the Hessian of c at the origin must be positive definite".into()));
    }
    let force: Vec<Poly> = (0..d).map(|i| q.partial(i).map(|g| -&g)).collect::<Result<_, _>>()?;
    if let Some(i) = force.iter().position(|p| !p.eval_rational(&origin).map(|v| v.is_zero()).unwrap_or(false)) {
        return Err(ProblemError::Hypothesis(format!("P_{i}(0) != 0: the force -dQ/dx must vanish at the origin")));
    }
    let n = 2 * d;
    let force = force.iter().map(|p| p.embed(n, 0)).collect::<Result<_, _>>()?;
    mechanical(t, m, force, c.embed(n, 0)?)
}

/// Minimum-time double integrator: `ẋ = v`, `v̇ = u`, running cost `1`.
pub fn time_optimal_di() -> AffineSystem {
    let n = 2;
    let f = PolyVec::with_nvars(n, vec![Poly::var(n, 1).expect("in range"), Poly::zero(n)]).expect("shape");
    let g = PolyVec::constant(n, &[Rational::zero(), Rational::one()]);
    AffineSystem::new(f, vec![g], Poly::one(n), vec![Poly::zero(n)], Poly::one(1)).expect("well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liecone::{ab_matrices, glc_check, GlcVerdict, DEFAULT_MAX_DEPTH};
    use crate::polyalg::parse_poly;

    #[test]
    fn classic_structure() {
        let aug = fuller_classic().augment();
        assert_eq!(aug.fbar().entries()[0], parse_poly("1/2 * x1^2", 3).unwrap());
        let rep = ab_matrices(&aug, DEFAULT_MAX_DEPTH).unwrap();
        assert_eq!((rep.k, rep.q), (4, Some(2)));
        assert!(rep.a_identically_zero());
        assert_eq!(rep.b_at(&[0.3, -0.2, 0.9], &[-1.0, 0.5, 0.1]).unwrap(), vec![vec![-1.0]]);
        assert_eq!(glc_check(&rep, &[0.0, 1.0, 2.0], &[-1.0, 3.0, 4.0]).unwrap(), GlcVerdict::Strict);
    }

    #[test]
    fn multi_identity_reduces_to_classic() {
        let one = MatrixParam::identity(1);
        assert_eq!(fuller_multi(&one, &one).unwrap(), fuller_classic());
    }

    #[test]
    fn multi_contract_violations() {
        let not_pd = MatrixParam::from_i64(&[&[1, 2], &[2, 1]]).unwrap();
        let id = MatrixParam::identity(2);
        assert_eq!(fuller_multi(&not_pd, &id), Err(ProblemError::NotPositiveDefinite { name: "M1" }));
        let asym = MatrixParam::from_i64(&[&[1, 2], &[0, 1]]).unwrap();
        assert_eq!(fuller_multi(&id, &asym), Err(ProblemError::NotSymmetric { name: "M2" }));
        let sing = MatrixParam::from_i64(&[&[1, 1], &[1, 1]]).unwrap();
        assert_eq!(fuller_multi(&id, &sing), Err(ProblemError::Singular { name: "M2" }));
        assert!(matches!(fuller_multi(&id, &MatrixParam::identity(3)), Err(ProblemError::Hypothesis(_))));
    }

    #[test]
    fn multi_b_matrix_exact() {
        let m1 = MatrixParam::from_i64(&[&[2, 1], &[1, 2]]).unwrap();
        let m2 = MatrixParam::from_i64(&[&[1, 0], &[0, 3]]).unwrap();
        let rep = ab_matrices(&fuller_multi(&m1, &m2).unwrap().augment(), DEFAULT_MAX_DEPTH).unwrap();
        // M1² = [[5,4],[4,5]]; M2 M1² M2 = [[5,12],[12,45]].
        let z = vec![rat(0, 1); 5];
        let p = vec![rat(-1, 1), rat(3, 1), rat(1, 2), rat(-2, 1), rat(7, 1)];
        let b = rep.b_at_rational(&z, &p).unwrap();
        let want = [[-5, -12], [-12, -45]];
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(b[i][j], rat(want[i][j], 1));
            }
        }
    }

    #[test]
    fn hamiltonian_rejects_nonzero_cost_at_origin() {
        let id = MatrixParam::identity(1);
        let err = hamiltonian_family(&id, &id, &Poly::zero(1), &Poly::one(1)).unwrap_err();
        assert!(matches!(err, ProblemError::Hypothesis(ref s) if s.contains("c(0)")));
    }

    #[test]
    fn hamiltonian_other_hypotheses() {
        let id = MatrixParam::identity(1);
        let c = parse_poly("1/2 * x0^2", 1).unwrap();
        let tilted = parse_poly("x0 + x0^2", 1).unwrap();
        assert!(hamiltonian_family(&id, &id, &Poly::zero(1), &tilted).is_err());
        let flat = parse_poly("x0^4", 1).unwrap();
        assert!(hamiltonian_family(&id, &id, &Poly::zero(1), &flat).is_err());
        let pushed = parse_poly("x0", 1).unwrap();
        assert!(hamiltonian_family(&id, &id, &pushed, &c).is_err());
        let quartic = parse_poly("1/4 * x0^4", 1).unwrap();
        assert!(hamiltonian_family(&id, &id, &quartic, &c).is_ok());
    }

    #[test]
    fn hamiltonian_quadratic_matches_multi() {
        let t = MatrixParam::from_i64(&[&[2, 1], &[1, 2]]).unwrap();
        let m = MatrixParam::from_i64(&[&[1, 0], &[0, 3]]).unwrap();
        let c = parse_poly("1/2 * x0^2 + 1/2 * x1^2", 2).unwrap();
        let ham = hamiltonian_family(&t, &m, &Poly::zero(2), &c).unwrap();
        assert_eq!(ham, fuller_multi(&t, &m).unwrap());
    }

    #[test]
    fn time_optimal_never_reaches_controls() {
        let aug = time_optimal_di().augment();
        assert!(ab_matrices(&aug, DEFAULT_MAX_DEPTH).is_err());
    }
}

#[cfg(test)]
mod certificate_tests {
    use super::*;
    use crate::liecone::{fuller_certificate, Certificate, Decidability, FailedHypothesis};
    use crate::polyalg::parse_poly;

    #[test]
    fn verdicts_on_builtins() {
        assert_eq!(fuller_certificate(&fuller_classic().augment()).unwrap().verdict, Certificate::Fuller);
        let m1 = MatrixParam::from_i64(&[&[2, 1], &[1, 2]]).unwrap();
        let m2 = MatrixParam::from_i64(&[&[1, 0], &[0, -3]]).unwrap();
        let rep = fuller_certificate(&fuller_multi(&m1, &m2).unwrap().augment()).unwrap();
        assert_eq!(rep.verdict, Certificate::Fuller);
        let to = fuller_certificate(&time_optimal_di().augment()).unwrap();
        assert_eq!(to.verdict, Certificate::NoSingularArc);
        let id = MatrixParam::identity(1);
        let q = parse_poly("1/4 * x0^4", 1).unwrap();
        let c = parse_poly("1/2 * x0^2", 1).unwrap();
        let ham = fuller_certificate(&hamiltonian_family(&id, &id, &q, &c).unwrap().augment()).unwrap();
        assert_eq!(ham.verdict, Certificate::Fuller);
        // A cubic term in c leaves an x-dependent B entry: not decidable from constants.
        let cubic = parse_poly("1/2 * x0^2 + x0^3", 1).unwrap();
        let rep = fuller_certificate(&hamiltonian_family(&id, &id, &q, &cubic).unwrap().augment()).unwrap();
        assert_eq!(rep.verdict, Certificate::Inconclusive);
        assert_eq!(rep.failed, Some(FailedHypothesis::NotInvertible(Decidability::Undecidable)));
        assert_eq!(ham.delta.rank, 2);
    }
}
