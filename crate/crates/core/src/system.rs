//! Affine optimal-control problems and their cost-augmented form.
//!
//! A problem is `minimize ∫ f0(x) + Σ g0_i(x) u_i dt` subject to
//! `ẋ = f(x) + Σ g_i(x) u_i`, `|u_i| ≤ K(t)`. Augmenting the state with the
//! running cost `x_0` gives fields `fbar = (f0, f)` and `gbar_i = (g0_i, g_i)`
//! on `z = (x_0, x)`.
//!
//! The adjoint is stored with `p[0] = -λ`, so that the Hamiltonian is the
//! plain pairing `H = <p, fbar> + Σ <p, gbar_i> u_i` and the adjoint equation
//! is `ṗ = -p ∂fbar/∂z - Σ u_i p ∂gbar_i/∂z`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::polyalg::{CompiledPoly, CompiledVec, Poly, PolyError, PolyVec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemError {
    #[error("malformed system: {field}: {msg}")]
    Shape { field: &'static str, msg: String },
    #[error("control bound K(t) = {value} is not strictly positive at t = {t}")]
    BoundNotPositive { t: f64, value: f64 },
    #[error("{what} has length {got}, expected {expected}")]
    Dim { what: &'static str, expected: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The optimal-control problem before augmentation.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSystem {
    n: usize,
    f: PolyVec,
    g: Vec<PolyVec>,
    f0: Poly,
    g0: Vec<Poly>,
    bound: Poly,
}

impl AffineSystem {
    /// Validates shapes: every field lives on the same `n`-dimensional state
    /// space, and `bound` is a polynomial in the single variable `t`.
    pub fn new(f: PolyVec, g: Vec<PolyVec>, f0: Poly, g0: Vec<Poly>, bound: Poly) -> Result<Self, SystemError> {
        let n = f.dim();
        let shape = |field, msg: String| SystemError::Shape { field, msg };
        if f.nvars() != n {
            return Err(shape("f", alloc::format!("{} components over {} variables", n, f.nvars())));
        }
        for (i, gi) in g.iter().enumerate() {
            if gi.dim() != n || gi.nvars() != n {
                return Err(shape("g", alloc::format!("g[{i}] has dim {} over {} variables, expected {n}", gi.dim(), gi.nvars())));
            }
        }
        if f0.nvars() != n {
            return Err(shape("f0", alloc::format!("{} variables, expected {n}", f0.nvars())));
        }
        if g0.len() != g.len() {
            return Err(shape("g0", alloc::format!("{} entries for {} inputs", g0.len(), g.len())));
        }
        if let Some(bad) = g0.iter().find(|p| p.nvars() != n) {
            return Err(shape("g0", alloc::format!("{} variables, expected {n}", bad.nvars())));
        }
        if bound.nvars() != 1 {
            return Err(shape("K", alloc::format!("{} variables, expected the single variable t", bound.nvars())));
        }
        Ok(AffineSystem { n, f, g, f0, g0, bound })
    }

    pub fn state_dim(&self) -> usize {
        self.n
    }

    pub fn inputs(&self) -> usize {
        self.g.len()
    }

    pub fn drift(&self) -> &PolyVec {
        &self.f
    }

    pub fn controls(&self) -> &[PolyVec] {
        &self.g
    }

    pub fn running_cost(&self) -> &Poly {
        &self.f0
    }

    pub fn control_cost(&self) -> &[Poly] {
        &self.g0
    }

    pub fn bound(&self) -> &Poly {
        &self.bound
    }

    /// Checks `K(t) > 0` at `samples` evenly spaced points of `[t0, t1]`.
    pub fn check_bound_positive(&self, t0: f64, t1: f64, samples: usize) -> Result<(), SystemError> {
        let k = CompiledPoly::new(&self.bound);
        let samples = samples.max(2);
        for s in 0..samples {
            let t = t0 + (t1 - t0) * s as f64 / (samples - 1) as f64;
            let value = k.eval(&[t]);
            if !(value > 0.0) {
                return Err(SystemError::BoundNotPositive { t, value });
            }
        }
        Ok(())
    }

    pub fn augment(&self) -> AugmentedSystem {
        augment(self)
    }
}

/// Builds `fbar = (f0, f)`, `gbar_i = (g0_i, g_i)` over `z = (x_0, x)`.
pub fn augment(sys: &AffineSystem) -> AugmentedSystem {
    let big = sys.n + 1;
    let lift = |v: &PolyVec, head: &Poly| -> PolyVec {
        v.embed(big, 1).and_then(|e| e.prepend(head.embed(big, 1)?)).expect("shapes validated at construction")
    };
    let fbar = lift(&sys.f, &sys.f0);
    let gbar = sys.g.iter().zip(&sys.g0).map(|(g, g0)| lift(g, g0)).collect();
    AugmentedSystem::from_fields(fbar, gbar, sys.bound.clone()).expect("augmented fields are consistent")
}

/// A single point of an extremal: time, augmented state, augmented adjoint
/// (`p[0] = -λ`) and control.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalPoint {
    pub t: f64,
    pub z: Vec<f64>,
    pub p: Vec<f64>,
    pub u: Vec<f64>,
}

/// Augmented adjoint `(-λ, p_state)`.
pub fn adjoint_with_multiplier(lambda: f64, p_state: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(p_state.len() + 1);
    p.push(-lambda);
    p.extend_from_slice(p_state);
    p
}

/// The cost-augmented system with `f64` evaluators prepared for the flow.
#[derive(Clone, Debug)]
pub struct AugmentedSystem {
    fbar: PolyVec,
    gbar: Vec<PolyVec>,
    bound: Poly,
    eval: Evaluators,
}

#[derive(Clone, Debug)]
struct Evaluators {
    f: CompiledVec,
    g: Vec<CompiledVec>,
    bound: CompiledPoly,
    // Column-wise nonzero partials: jac_f[k] = [(j, d fbar_j / d z_k)].
    jac_f: Vec<Vec<(usize, CompiledPoly)>>,
    jac_g: Vec<Vec<Vec<(usize, CompiledPoly)>>>,
}

fn transposed_jacobian(v: &PolyVec) -> Vec<Vec<(usize, CompiledPoly)>> {
    let jac = v.jacobian();
    (0..v.nvars())
        .map(|k| {
            jac.iter()
                .enumerate()
                .filter(|(_, row)| !row[k].is_zero())
                .map(|(j, row)| (j, CompiledPoly::new(&row[k])))
                .collect()
        })
        .collect()
}

impl AugmentedSystem {
    /// Assembles an augmented system directly from its fields. Every field
    /// must have dimension equal to its variable count.
    pub fn from_fields(fbar: PolyVec, gbar: Vec<PolyVec>, bound: Poly) -> Result<Self, SystemError> {
        let big = fbar.dim();
        if fbar.nvars() != big {
            return Err(SystemError::Shape { field: "fbar", msg: alloc::format!("dim {} over {} variables", big, fbar.nvars()) });
        }
        if let Some(g) = gbar.iter().find(|g| g.dim() != big || g.nvars() != big) {
            return Err(SystemError::Shape { field: "gbar", msg: alloc::format!("dim {} over {} variables, expected {big}", g.dim(), g.nvars()) });
        }
        if bound.nvars() != 1 {
            return Err(SystemError::Shape { field: "K", msg: "expected a polynomial in t".into() });
        }
        let eval = Evaluators {
            f: CompiledVec::new(&fbar),
            g: gbar.iter().map(CompiledVec::new).collect(),
            bound: CompiledPoly::new(&bound),
            jac_f: transposed_jacobian(&fbar),
            jac_g: gbar.iter().map(transposed_jacobian).collect(),
        };
        Ok(AugmentedSystem { fbar, gbar, bound, eval })
    }

    /// Augmented dimension `N = n + 1`.
    pub fn dim(&self) -> usize {
        self.fbar.dim()
    }

    pub fn inputs(&self) -> usize {
        self.gbar.len()
    }

    pub fn fbar(&self) -> &PolyVec {
        &self.fbar
    }

    pub fn gbar(&self) -> &[PolyVec] {
        &self.gbar
    }

    pub fn bound(&self) -> &Poly {
        &self.bound
    }

    pub fn bound_at(&self, t: f64) -> f64 {
        self.eval.bound.eval(&[t])
    }

    fn check(&self, what: &'static str, got: usize, expected: usize) -> Result<(), SystemError> {
        if got != expected {
            return Err(SystemError::Dim { what, expected, got });
        }
        Ok(())
    }

    fn check_zpu(&self, z: &[f64], p: &[f64], u: Option<&[f64]>) -> Result<(), SystemError> {
        self.check("z", z.len(), self.dim())?;
        self.check("p", p.len(), self.dim())?;
        if let Some(u) = u {
            self.check("u", u.len(), self.inputs())?;
        }
        Ok(())
    }

    /// `H = <p, fbar(z)> + Σ_i <p, gbar_i(z)> u_i`.
    pub fn hamiltonian(&self, z: &[f64], p: &[f64], u: &[f64]) -> Result<f64, SystemError> {
        self.check_zpu(z, p, Some(u))?;
        Ok(self.hamiltonian_unchecked(z, p, u))
    }

    pub(crate) fn hamiltonian_unchecked(&self, z: &[f64], p: &[f64], u: &[f64]) -> f64 {
        let mut h = self.eval.f.dot(p, z);
        for (g, ui) in self.eval.g.iter().zip(u) {
            if *ui != 0.0 {
                h += ui * g.dot(p, z);
            }
        }
        h
    }

    /// State and adjoint velocities of the extremal flow.
    pub fn extremal_rhs(&self, z: &[f64], p: &[f64], u: &[f64]) -> Result<(Vec<f64>, Vec<f64>), SystemError> {
        self.check_zpu(z, p, Some(u))?;
        let mut dz = vec![0.0; self.dim()];
        let mut dp = vec![0.0; self.dim()];
        self.state_rhs_into(z, u, &mut dz);
        self.adjoint_rhs_into(z, p, u, &mut dp);
        Ok((dz, dp))
    }

    /// `dz = fbar(z) + Σ gbar_i(z) u_i`; no dimension checks.
    pub(crate) fn state_rhs_into(&self, z: &[f64], u: &[f64], dz: &mut [f64]) {
        self.eval.f.eval_into(z, dz);
        for (g, &ui) in self.eval.g.iter().zip(u) {
            if ui == 0.0 {
                continue;
            }
            for (j, gj) in g.eval(z).into_iter().enumerate() {
                dz[j] += gj * ui;
            }
        }
    }

    /// `dp_k = -Σ_j p_j ∂fbar_j/∂z_k - Σ_i u_i Σ_j p_j ∂gbar_ij/∂z_k`.
    pub(crate) fn adjoint_rhs_into(&self, z: &[f64], p: &[f64], u: &[f64], dp: &mut [f64]) {
        for (k, out) in dp.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, d) in &self.eval.jac_f[k] {
                acc += p[*j] * d.eval(z);
            }
            for (jac, &ui) in self.eval.jac_g.iter().zip(u) {
                if ui == 0.0 {
                    continue;
                }
                for (j, d) in &jac[k] {
                    acc += ui * p[*j] * d.eval(z);
                }
            }
            *out = -acc;
        }
    }

    /// Switching functions `φ_i = <p, gbar_i(z)>`.
    pub fn switching_vector(&self, z: &[f64], p: &[f64]) -> Result<Vec<f64>, SystemError> {
        self.check_zpu(z, p, None)?;
        Ok(self.switching_unchecked(z, p))
    }

    pub(crate) fn switching_unchecked(&self, z: &[f64], p: &[f64]) -> Vec<f64> {
        self.eval.g.iter().map(|g| g.dot(p, z)).collect()
    }

    /// `<p, fbar(z)>`, the Hamiltonian restricted to a singular arc.
    pub fn drift_pairing(&self, z: &[f64], p: &[f64]) -> Result<f64, SystemError> {
        self.check_zpu(z, p, None)?;
        Ok(self.eval.f.dot(p, z))
    }
}
