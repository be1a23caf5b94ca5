use fullerlab_core::polyalg::{parse_poly, Poly};
use fullerlab_core::liecone::{ab_matrices, DEFAULT_MAX_DEPTH};
use fullerlab_core::problems::{fuller_classic, fuller_multi, hamiltonian_family, time_optimal_di, MatrixParam};
use fullerlab_core::simulate::{
    fit_chatter, integrate_extremal, max_abs_hamiltonian, scan_switching_gain, simulate_feedback, FeedbackLaw, SimError, SimOptions, Termination,
    Trajectory,
};
use fullerlab_core::system::AugmentedSystem;
use proptest::prelude::*;

fn no_target() -> SimOptions {
    SimOptions { target_radius: 0.0, ..SimOptions::default() }
}

/// Switching values at every sample of an extremal run.
fn phis(aug: &AugmentedSystem, tr: &Trajectory) -> Vec<Vec<f64>> {
    tr.samples.iter().map(|s| aug.switching_vector(&s.z, &s.p).unwrap()).collect()
}

fn event_residuals_ok(aug: &AugmentedSystem, tr: &Trajectory, tol: f64) {
    let all = phis(aug, tr);
    let scale = all.iter().flatten().fold(1.0f64, |a, v| a.max(v.abs()));
    for e in &tr.events {
        let idx = tr.samples.iter().position(|s| s.t == e.t).expect("events are sampled");
        let phi = all[idx][e.input_index];
        assert!(phi.abs() <= tol * scale, "|phi| = {phi:e} at t = {}", e.t);
        assert_eq!(phi.signum() as i8, e.direction);
    }
}

fn quartic_pendulum() -> AugmentedSystem {
    let id = MatrixParam::identity(1);
    let q = parse_poly("1/4 * x0^4", 1).unwrap();
    let c = parse_poly("1/2 * x0^2", 1).unwrap();
    hamiltonian_family(&id, &id, &q, &c).unwrap().augment()
}

#[test]
fn runs_are_bit_deterministic() {
    let aug = fuller_classic().augment();
    let a = integrate_extremal(&aug, &[0.0, 1.0, 0.0], &[-0.95, -0.5], 1.0, 5.0, &SimOptions::default()).unwrap();
    let b = integrate_extremal(&aug, &[0.0, 1.0, 0.0], &[-0.95, -0.5], 1.0, 5.0, &SimOptions::default()).unwrap();
    assert_eq!(a, b);
    let sys = fuller_classic();
    let f1 = simulate_feedback(&sys, &FeedbackLaw::fuller_curve(0.3), &[1.0, 0.0], 10.0, &no_target()).unwrap();
    let f2 = simulate_feedback(&sys, &FeedbackLaw::fuller_curve(0.3), &[1.0, 0.0], 10.0, &no_target()).unwrap();
    assert_eq!(f1.events, f2.events);
}

#[test]
fn event_localization_converges() {
    // Bang arcs of the Fuller extremal are polynomial in t, so integration is
    // exact up to rounding; τ_event sits above the rounding accumulated over
    // a long arc (about 2e-14 here).
    let aug = fuller_classic().augment();
    let coarse = SimOptions { tol_event: 1e-12, ..SimOptions::default() };
    let fine = SimOptions { tol_event: coarse.tol_event / 2.0, rtol: coarse.rtol / 2.0, ..coarse.clone() };
    let a = integrate_extremal(&aug, &[0.0, 1.0, 0.0], &[-0.95, -0.5], 1.0, 5.0, &coarse).unwrap();
    let b = integrate_extremal(&aug, &[0.0, 1.0, 0.0], &[-0.95, -0.5], 1.0, 5.0, &fine).unwrap();
    assert_eq!(a.events.len(), b.events.len());
    assert!(!a.events.is_empty());
    for (x, y) in a.events.iter().zip(&b.events) {
        assert!((x.t - y.t).abs() < coarse.tol_event, "{} vs {} slope {}", x.t, y.t, x.phi_slope);
    }
    // Non-polynomial arcs: the bound holds once τ_event dominates the integration error.
    let aug = quartic_pendulum();
    let coarse = SimOptions { tol_event: 1e-8, ..SimOptions::default() };
    let fine = SimOptions { tol_event: 5e-9, rtol: 5e-13, ..coarse.clone() };
    let a = integrate_extremal(&aug, &[0.0, 1.0, 0.0], &[-0.7, -0.25], 1.0, 6.0, &coarse).unwrap();
    let b = integrate_extremal(&aug, &[0.0, 1.0, 0.0], &[-0.7, -0.25], 1.0, 6.0, &fine).unwrap();
    assert_eq!(a.events.len(), b.events.len());
    assert!(!a.events.is_empty());
    for (x, y) in a.events.iter().zip(&b.events) {
        assert!((x.t - y.t).abs() < coarse.tol_event);
    }
}

#[test]
fn chattering_extremal_from_shooting() {
    // Shoot p1 (with p2 = -1/2 so that H(0) = 0) until the first two switch
    // points lie on the same curve x = -c v|v|, the self-similarity of the
    // optimal synthesis.
    let aug = fuller_classic().augment();
    let constants = |p1: f64| -> (Trajectory, Vec<f64>) {
        let tr = integrate_extremal(&aug, &[0.0, 1.0, 0.0], &[p1, -0.5], 1.0, 4.0, &SimOptions::default()).unwrap();
        let c = tr
            .events
            .iter()
            .map(|e| {
                let s = tr.samples.iter().find(|s| s.t == e.t).unwrap();
                -s.z[1] / (s.z[2] * s.z[2].abs())
            })
            .collect();
        (tr, c)
    };
    let mismatch = |p1: f64| {
        let c = constants(p1).1;
        c[0] - c[1]
    };
    let (mut a, mut b) = (-0.956f64, -0.955f64);
    let fa = mismatch(a);
    assert!(fa * mismatch(b) < 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        if (mismatch(mid) > 0.0) == (fa > 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    let (tr, c) = constants(a);
    assert!(max_abs_hamiltonian(&aug, &tr) <= 1e-7);
    // The curve constant agrees with the feedback scan.
    let scan = scan_switching_gain(&fuller_classic(), &[1.0, 0.0], 0.40, 0.50, 0.005, 10.0, &no_target()).unwrap();
    assert!((c[0] - scan.best_beta).abs() < 0.005, "{} vs {}", c[0], scan.best_beta);
    // Tracked switches before f64 error amplification takes over.
    let tracked = c.iter().take_while(|x| (*x - c[0]).abs() < 1e-3).count();
    assert!(tracked >= 4, "{c:?}");
    let intervals: Vec<f64> = tr.events.windows(2).take(tracked - 1).map(|w| w[1].t - w[0].t).collect();
    assert!(intervals.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn extremal_runs_conserve_h() {
    let cases: Vec<(AugmentedSystem, Vec<f64>, Vec<f64>)> = vec![
        (fuller_classic().augment(), vec![0.0, 1.0, 0.0], vec![-0.95, -0.5]),
        (quartic_pendulum(), vec![0.0, 1.0, 0.0], vec![-0.7, -0.25]),
        (time_optimal_di().augment(), vec![0.0, 1.0, 0.0], vec![0.8, 1.0]),
    ];
    for (aug, z0, p0) in cases {
        let tr = integrate_extremal(&aug, &z0, &p0, 1.0, 4.0, &SimOptions::default()).unwrap();
        let h0 = aug.hamiltonian(&tr.samples[0].z, &tr.samples[0].p, &tr.samples[0].u).unwrap();
        assert!(h0.abs() < 1e-15, "{h0}");
        assert!(max_abs_hamiltonian(&aug, &tr) <= 1e-7);
        event_residuals_ok(&aug, &tr, SimOptions::default().tol_event);
        for w in tr.samples.windows(2) {
            assert!(w[1].t > w[0].t);
        }
    }
}

#[test]
fn negative_controls_never_flag() {
    let sys = fuller_classic();
    let tr = simulate_feedback(&sys, &FeedbackLaw::fuller_curve(0.0), &[1.0, 0.0], 40.0, &no_target()).unwrap();
    assert_eq!(tr.terminated_by, Termination::Horizon);
    let rep = fit_chatter(&tr).unwrap();
    assert!(!rep.accumulation());
    let rho = rep.inputs[0].rho.unwrap();
    assert!((rho - 1.0).abs() < 1e-6, "{rho}");
}

#[test]
fn time_optimal_extremal_switches_at_most_once() {
    let aug = time_optimal_di().augment();
    let tr = integrate_extremal(&aug, &[0.0, 1.0, 0.0], &[0.8, 0.5], 1.0, 5.0, &SimOptions::default()).unwrap();
    assert_eq!(tr.events.len(), 1);
    assert_eq!(fit_chatter(&tr), Err(SimError::InsufficientSwitches { best: 1 }));
}

#[test]
fn grazing_contact_keeps_control() {
    // s = (x - 1/2)^2 - 1e-20 touches zero tangentially near x = 1/2 while v moves x at unit speed.
    let sys = time_optimal_di();
    let s = parse_poly("x0^2 - x0 + 1/4", 2).unwrap();
    let s = &s - &Poly::constant(2, fullerlab_core::polyalg::rat(1, 1_000_000_000_000_000));
    let law = FeedbackLaw { surfaces: vec![fullerlab_core::simulate::SwitchingSurface::Polynomial(s)] };
    let tr = simulate_feedback(&sys, &law, &[0.0, 1.0], 0.2, &no_target());
    // Either a tiny crossing pair is seen (as grazing or events), or nothing: the run must stay well-formed.
    let tr = tr.unwrap();
    assert_eq!(tr.terminated_by, Termination::Horizon);
    for w in tr.samples.windows(2) {
        assert!(w[1].t > w[0].t);
    }
}

#[test]
fn fourth_derivative_of_phi_matches_ladder() {
    let m1 = MatrixParam::from_i64(&[&[2, 1], &[1, 2]]).unwrap();
    let m2 = MatrixParam::from_i64(&[&[1, 0], &[0, -3]]).unwrap();
    let aug = fuller_multi(&m1, &m2).unwrap().augment();
    let rep = ab_matrices(&aug, DEFAULT_MAX_DEPTH).unwrap();
    assert_eq!(rep.k, 4);
    let z0 = [0.0, 0.4, -0.3, 0.2, 0.1];
    let p0 = [0.7, -0.2, 5.0, 5.0];
    let opts = SimOptions::default();
    let at = |t: f64| {
        let tr = integrate_extremal(&aug, &z0, &p0, 1.0, t, &opts).unwrap();
        assert!(tr.events.is_empty());
        tr.samples.last().unwrap().clone()
    };
    for tc in [0.2, 0.3, 0.45] {
        let h = 0.02;
        let phi: Vec<Vec<f64>> = (-2..=2).map(|j| {
            let s = at(tc + h * j as f64);
            aug.switching_vector(&s.z, &s.p).unwrap()
        }).collect();
        let mid = at(tc);
        let a = rep.a_at(&mid.z, &mid.p).unwrap();
        let b = rep.b_at(&mid.z, &mid.p).unwrap();
        for i in 0..2 {
            let fd = (phi[0][i] - 4.0 * phi[1][i] + 6.0 * phi[2][i] - 4.0 * phi[3][i] + phi[4][i]) / (h * h * h * h);
            let exact = a[i] + b[i].iter().zip(&mid.u).map(|(x, y)| x * y).sum::<f64>();
            assert!((fd - exact).abs() <= 1e-4 * exact.abs(), "input {i} at {tc}: {fd} vs {exact}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn feedback_events_alternate(beta in 0.1f64..0.49, x0 in 0.2f64..2.0, v0 in -1.0f64..1.0) {
        let sys = fuller_classic();
        let tr = simulate_feedback(&sys, &FeedbackLaw::fuller_curve(beta), &[x0, v0], 20.0, &SimOptions::default()).unwrap();
        prop_assert!(tr.terminated_by == Termination::TargetBall || tr.terminated_by == Termination::ZenoFloor);
        for w in tr.events.windows(2) {
            prop_assert!(w[1].t > w[0].t);
            prop_assert_eq!(w[1].direction, -w[0].direction);
        }
    }
}
