//! One-sided derivative comparison of a control component at a time `t_c`.

use alloc::vec::Vec;

use super::{SimError, Trajectory};
use crate::polyalg::Poly;

/// Relative threshold for a derivative jump.
pub const DEFAULT_JUMP_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct JunctionEstimate {
    /// Lowest derivative order of `u` that jumps at `t_c`; `None` when
    /// orders `0..=3` all agree.
    pub r: Option<usize>,
    /// Right limit minus left limit of `u^(r)`.
    pub u_jump: Option<f64>,
    /// `K(t_c)`.
    pub bound: f64,
    pub left: [f64; 4],
    pub right: [f64; 4],
}

/// Derivatives `0..=3` at `at` of the cubic through four samples.
fn cubic_derivatives(ts: &[f64], us: &[f64], at: f64) -> [f64; 4] {
    let x: Vec<f64> = ts.iter().map(|t| t - at).collect();
    // Newton divided differences.
    let mut c = us.to_vec();
    for level in 1..4 {
        for j in (level..4).rev() {
            c[j] = (c[j] - c[j - 1]) / (x[j] - x[j - level]);
        }
    }
    // Expand c0 + c1 (τ-x0) + c2 (τ-x0)(τ-x1) + c3 (τ-x0)(τ-x1)(τ-x2) in powers of τ.
    let mut poly = [c[3], 0.0, 0.0, 0.0];
    let mut deg = 0;
    for j in (0..3).rev() {
        // poly = poly * (τ - x_j) + c_j
        let mut next = [0.0; 4];
        for d in 0..=deg {
            next[d + 1] += poly[d];
            next[d] -= poly[d] * x[j];
        }
        next[0] += c[j];
        poly = next;
        deg += 1;
    }
    [poly[0], poly[1], 2.0 * poly[2], 6.0 * poly[3]]
}

/// Estimates the junction order `r` of control `input` at `t_c` from the
/// four nearest samples on each side, staying within the arcs bounded by
/// neighbouring switches of the same input.
pub fn estimate_junction(traj: &Trajectory, t_c: f64, bound: &Poly, input: usize, tol: f64) -> Result<JunctionEstimate, SimError> {
    let inputs = traj.samples.first().map_or(0, |s| s.u.len());
    if input >= inputs {
        return Err(SimError::InputIndex { index: input, inputs });
    }
    let prev = traj.events_for(input).map(|e| e.t).filter(|&t| t < t_c).last().unwrap_or(f64::NEG_INFINITY);
    let next = traj.events_for(input).map(|e| e.t).find(|&t| t > t_c).unwrap_or(f64::INFINITY);
    let left: Vec<_> = traj.samples.iter().filter(|s| s.t >= prev && s.t < t_c).collect();
    let right: Vec<_> = traj.samples.iter().filter(|s| s.t >= t_c && s.t < next).collect();
    if left.len() < 4 || right.len() < 4 {
        return Err(SimError::JunctionAtBoundary { t_c });
    }
    let left = &left[left.len() - 4..];
    let right = &right[..4];
    let side = |pts: &[&crate::system::ExtremalPoint]| {
        let ts: Vec<f64> = pts.iter().map(|s| s.t).collect();
        let us: Vec<f64> = pts.iter().map(|s| s.u[input]).collect();
        cubic_derivatives(&ts, &us, t_c)
    };
    let (l, r) = (side(left), side(right));
    let k = bound.eval_f64(&[t_c])?;
    let order = (0..4).find(|&j| (r[j] - l[j]).abs() > tol * 1f64.max(l[j].abs()).max(r[j].abs()));
    Ok(JunctionEstimate { r: order, u_jump: order.map(|j| r[j] - l[j]), bound: k, left: l, right: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::fuller_classic;
    use crate::simulate::{simulate_feedback, FeedbackLaw, SimOptions, Termination};
    use crate::system::ExtremalPoint;
    use alloc::vec;

    fn synthetic(u: impl Fn(f64) -> f64, tc: f64) -> Trajectory {
        let samples = (0..40)
            .map(|j| {
                let t = tc - 0.2 + 0.01 * j as f64;
                ExtremalPoint { t, z: vec![], p: vec![], u: vec![u(t)] }
            })
            .collect();
        Trajectory { samples, events: vec![], grazing: vec![], terminated_by: Termination::Horizon }
    }

    #[test]
    fn cubic_derivatives_exact() {
        let ts = [0.1, 0.3, 0.4, 0.9];
        let us: Vec<f64> = ts.iter().map(|t| 1.0 - 2.0 * t + 0.5 * t * t + 3.0 * t * t * t).collect();
        let d = cubic_derivatives(&ts, &us, 0.5);
        let want = [1.0 - 1.0 + 0.125 + 0.375, -2.0 + 0.5 + 2.25, 1.0 + 9.0, 18.0];
        for (a, b) in d.iter().zip(want) {
            assert!((a - b).abs() < 1e-9, "{d:?}");
        }
    }

    #[test]
    fn bang_bang_switch_has_order_zero() {
        let sys = fuller_classic();
        let o = SimOptions { target_radius: 0.0, ..SimOptions::default() };
        let tr = simulate_feedback(&sys, &FeedbackLaw::fuller_curve(0.4446), &[1.0, 0.0], 10.0, &o).unwrap();
        let tc = tr.events[1].t;
        let est = estimate_junction(&tr, tc, sys.bound(), 0, DEFAULT_JUMP_TOL).unwrap();
        assert_eq!(est.r, Some(0));
        assert_eq!(est.u_jump.unwrap().abs(), 2.0 * est.bound);
    }

    #[test]
    fn continuous_control_with_kinked_rate() {
        // Singular control u_s = t reaching the bound K = 1 at t_c = 1, then a bang arc.
        let tr = synthetic(|t| if t < 1.0 { t } else { 1.0 }, 1.0);
        let est = estimate_junction(&tr, 1.0, &Poly::one(1), 0, DEFAULT_JUMP_TOL).unwrap();
        assert_eq!(est.r, Some(1));
        assert!((est.u_jump.unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn smooth_control_has_no_order() {
        let tr = synthetic(|t| 0.3 * t * t - t, 1.0);
        assert_eq!(estimate_junction(&tr, 1.0, &Poly::one(1), 0, DEFAULT_JUMP_TOL).unwrap().r, None);
    }

    #[test]
    fn boundary_is_rejected() {
        let tr = synthetic(|t| t, 1.0);
        assert_eq!(estimate_junction(&tr, 0.81, &Poly::one(1), 0, DEFAULT_JUMP_TOL), Err(SimError::JunctionAtBoundary { t_c: 0.81 }));
        assert!(matches!(estimate_junction(&tr, 1.0, &Poly::one(1), 3, DEFAULT_JUMP_TOL), Err(SimError::InputIndex { .. })));
    }
}
