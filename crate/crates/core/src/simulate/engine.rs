//! Event-driven bang-bang integration shared by the extremal and feedback
//! runs.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::dopri::Dopri;
use super::{GrazingContact, SimError, SimOptions, SwitchEvent, Termination, Trajectory};
use crate::liecone::lie_bracket;
use crate::polyalg::{CompiledPoly, CompiledVec, Poly};
use crate::system::{adjoint_with_multiplier, AffineSystem, AugmentedSystem, ExtremalPoint};

/// The closed-loop or extremal vector field seen by the event loop.
trait Flow {
    fn dim(&self) -> usize;
    fn inputs(&self) -> usize;
    fn bound(&self, t: f64) -> f64;
    /// `u_i = gain σ_i K(t)` where `σ_i` is the sign of the switching
    /// function.
    fn gain(&self) -> f64;
    fn rhs(&self, y: &[f64], u: &[f64], dy: &mut [f64]);
    fn switching(&self, y: &[f64], out: &mut [f64]);
    /// `(dφ_i/dt, magnitude of the terms forming it)`.
    fn slope(&self, y: &[f64], u: &[f64], i: usize) -> (f64, f64);
    fn point(&self, t: f64, y: &[f64], u: &[f64]) -> ExtremalPoint;
    fn target_norm(&self, y: &[f64]) -> f64;
}

struct ExtremalFlow<'a> {
    aug: &'a AugmentedSystem,
    /// `[fbar, gbar_i]`
    lf: Vec<CompiledVec>,
    /// `lg[i][j] = [gbar_j, gbar_i]`
    lg: Vec<Vec<CompiledVec>>,
}

impl<'a> ExtremalFlow<'a> {
    fn new(aug: &'a AugmentedSystem) -> Result<Self, SimError> {
        let gbar = aug.gbar();
        let lf = gbar.iter().map(|g| lie_bracket(aug.fbar(), g).map(|b| CompiledVec::new(&b))).collect::<Result<_, _>>()?;
        let lg = gbar
            .iter()
            .map(|gi| gbar.iter().map(|gj| lie_bracket(gj, gi).map(|b| CompiledVec::new(&b))).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        Ok(ExtremalFlow { aug, lf, lg })
    }
}

impl Flow for ExtremalFlow<'_> {
    fn dim(&self) -> usize {
        2 * self.aug.dim()
    }
    fn inputs(&self) -> usize {
        self.aug.inputs()
    }
    fn bound(&self, t: f64) -> f64 {
        self.aug.bound_at(t)
    }
    fn gain(&self) -> f64 {
        1.0
    }
    fn rhs(&self, y: &[f64], u: &[f64], dy: &mut [f64]) {
        let n = self.aug.dim();
        let (z, p) = y.split_at(n);
        let (dz, dp) = dy.split_at_mut(n);
        self.aug.state_rhs_into(z, u, dz);
        self.aug.adjoint_rhs_into(z, p, u, dp);
    }
    fn switching(&self, y: &[f64], out: &mut [f64]) {
        let (z, p) = y.split_at(self.aug.dim());
        out.copy_from_slice(&self.aug.switching_unchecked(z, p));
    }
    fn slope(&self, y: &[f64], u: &[f64], i: usize) -> (f64, f64) {
        let (z, p) = y.split_at(self.aug.dim());
        let mut total = 0.0;
        let mut scale = 0.0;
        let mut add = |w: &[f64], c: f64| {
            for (pk, wk) in p.iter().zip(w) {
                total += c * pk * wk;
                scale += (c * pk * wk).abs();
            }
        };
        add(&self.lf[i].eval(z), 1.0);
        for (j, &uj) in u.iter().enumerate() {
            if uj != 0.0 {
                add(&self.lg[i][j].eval(z), uj);
            }
        }
        (total, scale)
    }
    fn point(&self, t: f64, y: &[f64], u: &[f64]) -> ExtremalPoint {
        let (z, p) = y.split_at(self.aug.dim());
        ExtremalPoint { t, z: z.to_vec(), p: p.to_vec(), u: u.to_vec() }
    }
    fn target_norm(&self, _y: &[f64]) -> f64 {
        f64::INFINITY
    }
}

/// Switching surface `s(x)` over the (non-augmented) state; the control is
/// `u = -sign(s(x)) K(t)`.
#[derive(Clone, Debug, PartialEq)]
pub enum SwitchingSurface {
    Polynomial(Poly),
    /// `s = x_position + beta * x_velocity * |x_velocity|`.
    FullerCurve { position: usize, velocity: usize, beta: f64 },
}

/// One switching surface per input.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedbackLaw {
    pub surfaces: Vec<SwitchingSurface>,
}

impl FeedbackLaw {
    /// The single-input Fuller family on state `(x, v)`.
    pub fn fuller_curve(beta: f64) -> Self {
        FeedbackLaw { surfaces: vec![SwitchingSurface::FullerCurve { position: 0, velocity: 1, beta }] }
    }
}

enum CompiledSurface {
    Poly { s: CompiledPoly, grad: Vec<CompiledPoly> },
    Curve { position: usize, velocity: usize, beta: f64 },
}

impl CompiledSurface {
    fn value(&self, x: &[f64]) -> f64 {
        match self {
            CompiledSurface::Poly { s, .. } => s.eval(x),
            CompiledSurface::Curve { position, velocity, beta } => x[*position] + beta * x[*velocity] * x[*velocity].abs(),
        }
    }

    /// `(∇s · dx, Σ |∂s/∂x_k dx_k|)`
    fn slope(&self, x: &[f64], dx: &[f64]) -> (f64, f64) {
        let terms: Vec<f64> = match self {
            CompiledSurface::Poly { grad, .. } => grad.iter().zip(dx).map(|(g, d)| g.eval(x) * d).collect(),
            CompiledSurface::Curve { position, velocity, beta } => {
                vec![dx[*position], 2.0 * beta * x[*velocity].abs() * dx[*velocity]]
            }
        };
        (terms.iter().sum(), terms.iter().map(|t| t.abs()).sum())
    }
}

struct FeedbackFlow {
    aug: AugmentedSystem,
    surfaces: Vec<CompiledSurface>,
}

impl Flow for FeedbackFlow {
    fn dim(&self) -> usize {
        self.aug.dim()
    }
    fn inputs(&self) -> usize {
        self.aug.inputs()
    }
    fn bound(&self, t: f64) -> f64 {
        self.aug.bound_at(t)
    }
    fn gain(&self) -> f64 {
        -1.0
    }
    fn rhs(&self, y: &[f64], u: &[f64], dy: &mut [f64]) {
        self.aug.state_rhs_into(y, u, dy);
    }
    fn switching(&self, y: &[f64], out: &mut [f64]) {
        for (o, s) in out.iter_mut().zip(&self.surfaces) {
            *o = s.value(&y[1..]);
        }
    }
    fn slope(&self, y: &[f64], u: &[f64], i: usize) -> (f64, f64) {
        let mut dz = vec![0.0; y.len()];
        self.aug.state_rhs_into(y, u, &mut dz);
        self.surfaces[i].slope(&y[1..], &dz[1..])
    }
    fn point(&self, t: f64, y: &[f64], u: &[f64]) -> ExtremalPoint {
        ExtremalPoint { t, z: y.to_vec(), p: Vec::new(), u: u.to_vec() }
    }
    fn target_norm(&self, y: &[f64]) -> f64 {
        libm::sqrt(y[1..].iter().map(|v| v * v).sum())
    }
}

/// Integrates the extremal flow from augmented state `z0`, state adjoint
/// `p0` and cost multiplier `lambda` (the augmented adjoint is
/// `(-lambda, p0)`), with `u_i = sign(φ_i) K(t)` frozen between events.
pub fn integrate_extremal(aug: &AugmentedSystem, z0: &[f64], p0: &[f64], lambda: f64, horizon: f64, opts: &SimOptions) -> Result<Trajectory, SimError> {
    opts.validate()?;
    let n = aug.dim();
    if z0.len() != n {
        return Err(SimError::Dim { what: "z0", expected: n, got: z0.len() });
    }
    if p0.len() + 1 != n {
        return Err(SimError::Dim { what: "p0", expected: n - 1, got: p0.len() });
    }
    if lambda == 0.0 && p0.iter().all(|v| *v == 0.0) {
        return Err(SimError::ZeroMultiplier);
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(SimError::BadOption("horizon"));
    }
    let flow = ExtremalFlow::new(aug)?;
    let mut y = z0.to_vec();
    y.extend(adjoint_with_multiplier(lambda, p0));
    Ok(run(&flow, 0.0, y, horizon, opts, 0.0))
}

/// Closed-loop run of `u_i = -sign(s_i(x)) K(t)` from state `x0`; the cost
/// is carried as the first coordinate of each sample's `z`.
pub fn simulate_feedback(sys: &AffineSystem, law: &FeedbackLaw, x0: &[f64], horizon: f64, opts: &SimOptions) -> Result<Trajectory, SimError> {
    opts.validate()?;
    let n = sys.state_dim();
    if x0.len() != n {
        return Err(SimError::Dim { what: "x0", expected: n, got: x0.len() });
    }
    if law.surfaces.len() != sys.inputs() {
        return Err(SimError::LawInputs { expected: sys.inputs(), got: law.surfaces.len() });
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(SimError::BadOption("horizon"));
    }
    let surfaces = law
        .surfaces
        .iter()
        .enumerate()
        .map(|(input, s)| match s {
            SwitchingSurface::Polynomial(p) => {
                if p.nvars() != n {
                    return Err(SimError::Surface { input, msg: format!("polynomial over {} variables, state has {n}", p.nvars()) });
                }
                let grad = (0..n).map(|k| p.partial(k).map(|d| CompiledPoly::new(&d))).collect::<Result<_, _>>()?;
                Ok(CompiledSurface::Poly { s: CompiledPoly::new(p), grad })
            }
            &SwitchingSurface::FullerCurve { position, velocity, beta } => {
                if position >= n || velocity >= n {
                    return Err(SimError::Surface { input, msg: format!("state index out of range for dimension {n}") });
                }
                if !beta.is_finite() {
                    return Err(SimError::Surface { input, msg: "beta must be finite".into() });
                }
                Ok(CompiledSurface::Curve { position, velocity, beta })
            }
        })
        .collect::<Result<_, _>>()?;
    let flow = FeedbackFlow { aug: sys.augment(), surfaces };
    let mut y = vec![0.0];
    y.extend_from_slice(x0);
    Ok(run(&flow, 0.0, y, horizon, opts, opts.target_radius))
}

/// Largest `|H|` over the samples of an extremal run.
pub fn max_abs_hamiltonian(aug: &AugmentedSystem, traj: &Trajectory) -> f64 {
    traj.samples.iter().map(|s| aug.hamiltonian_unchecked(&s.z, &s.p, &s.u).abs()).fold(0.0, f64::max)
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

fn controls<F: Flow>(flow: &F, t: f64, sigma: &[i8], u: &mut [f64]) {
    let k = flow.bound(t);
    for (ui, &s) in u.iter_mut().zip(sigma) {
        *ui = flow.gain() * f64::from(s) * k;
    }
}

fn run<F: Flow>(flow: &F, t0: f64, mut y: Vec<f64>, horizon: f64, opts: &SimOptions, target: f64) -> Trajectory {
    let dim = flow.dim();
    let m = flow.inputs();
    let t_end = t0 + horizon;
    let mut stepper = Dopri::new(dim);
    let mut phi = vec![0.0; m];
    let mut u = vec![0.0; m];
    let mut ynew = vec![0.0; dim];

    // Initial signs; a vanishing φ takes the sign of its drift slope.
    flow.switching(&y, &mut phi);
    let zero_u = vec![0.0; m];
    let mut last_sign: Vec<i8> = (0..m)
        .map(|i| match sign(phi[i]) {
            0 => match sign(flow.slope(&y, &zero_u, i).0) {
                0 => 1,
                s => s,
            },
            s => s,
        })
        .collect();
    let mut sigma = last_sign.clone();
    let mut last_event: Vec<Option<f64>> = vec![None; m];
    let mut last_any: Option<f64> = None;

    let mut phi_max = phi.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut t = t0;
    controls(flow, t, &sigma, &mut u);
    let mut traj = Trajectory { samples: vec![flow.point(t, &y, &u)], events: Vec::new(), grazing: Vec::new(), terminated_by: Termination::Horizon };
    let mut h = opts.initial_step.min(opts.max_step);
    let mut steps = 0usize;

    loop {
        if t >= t_end {
            traj.terminated_by = Termination::Horizon;
            break;
        }
        if target > 0.0 && flow.target_norm(&y) <= target {
            traj.terminated_by = Termination::TargetBall;
            break;
        }
        steps += 1;
        if steps > opts.max_steps {
            traj.terminated_by = Termination::Error(format!("step budget exhausted at t = {t}"));
            break;
        }
        let hmin = 8.0 * f64::EPSILON * t.abs().max(1e-300);
        let last_step = h >= t_end - t;
        if last_step {
            h = t_end - t;
        }
        let sig = sigma.clone();
        let mut rhs = |tau: f64, yy: &[f64], dy: &mut [f64]| {
            let mut uu = vec![0.0; m];
            controls(flow, tau, &sig, &mut uu);
            flow.rhs(yy, &uu, dy);
        };
        let err = stepper.step(&mut rhs, t, &y, h, opts.rtol, opts.atol, &mut ynew);
        if !err.is_finite() || ynew.iter().any(|v| !v.is_finite()) {
            if h / 10.0 < hmin {
                traj.terminated_by = Termination::Error(format!("non-finite state at t = {t}"));
                break;
            }
            h /= 10.0;
            continue;
        }
        if err > 1.0 {
            h *= (0.9 * libm::pow(err, -0.2)).max(0.2);
            if h < hmin {
                traj.terminated_by = Termination::Error(format!("step size underflow at t = {t}"));
                break;
            }
            continue;
        }
        flow.switching(&ynew, &mut phi);
        let flipped = |phi: &[f64]| (0..m).any(|i| sign(phi[i]) != 0 && sign(phi[i]) != last_sign[i]);
        if !flipped(&phi) {
            phi_max = phi.iter().fold(phi_max, |a, v| a.max(v.abs()));
            t = if last_step { t_end } else { t + h };
            core::mem::swap(&mut y, &mut ynew);
            controls(flow, t, &sigma, &mut u);
            traj.samples.push(flow.point(t, &y, &u));
            let grow = if err == 0.0 { 5.0 } else { (0.9 * libm::pow(err, -0.2)).min(5.0) };
            h *= grow.max(1.0);
            continue;
        }

        // Earliest sign change in (0, h], localized by re-stepping from t.
        // The bracket is driven to tol_event / 64 so that the error carried
        // into later events stays below tol_event, and further while the
        // flipped switching functions are large on the scale of the run.
        let floor = 4.0 * f64::EPSILON * t.abs();
        let width = (opts.tol_event / 64.0).max(floor);
        let small = opts.tol_event * phi_max.max(1.0);
        let settled = |phi: &[f64]| (0..m).all(|i| sign(phi[i]) == last_sign[i] || sign(phi[i]) == 0 || phi[i].abs() <= small);
        let (mut lo, mut hi) = (0.0, h);
        let mut yhi = ynew.clone();
        let mut ymid = vec![0.0; dim];
        let mut phi_hi = phi.clone();
        while hi - lo > width || (hi - lo > floor && !settled(&phi_hi)) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            stepper.step(&mut rhs, t, &y, mid, opts.rtol, opts.atol, &mut ymid);
            flow.switching(&ymid, &mut phi);
            if flipped(&phi) {
                hi = mid;
                phi_hi.copy_from_slice(&phi);
                core::mem::swap(&mut yhi, &mut ymid);
            } else {
                lo = mid;
            }
        }
        let te = t + hi;
        y = yhi;
        flow.switching(&y, &mut phi);
        controls(flow, te, &sigma, &mut u);
        let mut zeno = false;
        let mut switched = false;
        for i in 0..m {
            let s = sign(phi[i]);
            if s == 0 || s == last_sign[i] {
                continue;
            }
            last_sign[i] = s;
            let (slope, scale) = flow.slope(&y, &u, i);
            if scale == 0.0 || slope.abs() < opts.tol_graze * scale {
                traj.grazing.push(GrazingContact { t: te, input_index: i, phi_slope: slope });
                continue;
            }
            if let Some(prev) = last_event[i] {
                zeno |= te - prev < opts.zeno_floor;
            }
            sigma[i] = s;
            last_event[i] = Some(te);
            switched = true;
            traj.events.push(SwitchEvent { t: te, input_index: i, direction: s, phi_slope: slope });
        }
        if switched {
            if let Some(prev) = last_any {
                h = h.min(0.05 * (te - prev));
            }
            last_any = Some(te);
        }
        t = te;
        controls(flow, t, &sigma, &mut u);
        traj.samples.push(flow.point(t, &y, &u));
        if zeno {
            traj.terminated_by = Termination::ZenoFloor;
            break;
        }
        h = h.max(4.0 * hmin);
    }
    traj
}
