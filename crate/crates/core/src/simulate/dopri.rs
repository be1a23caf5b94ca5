//! Dormand–Prince 5(4) single step with embedded error estimate.

use alloc::vec;
use alloc::vec::Vec;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

/// Fifth-order weights minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Reusable stage storage.
pub(crate) struct Dopri {
    k: Vec<Vec<f64>>,
    tmp: Vec<f64>,
}

impl Dopri {
    pub(crate) fn new(dim: usize) -> Self {
        Dopri { k: vec![vec![0.0; dim]; 7], tmp: vec![0.0; dim] }
    }

    /// Advances `y` at `t` by `h` into `out` and returns the scaled error
    /// norm `max_j |err_j| / (atol + rtol max(|y_j|, |out_j|))`.
    pub(crate) fn step<F>(&mut self, rhs: &mut F, t: f64, y: &[f64], h: f64, rtol: f64, atol: f64, out: &mut [f64]) -> f64
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let n = y.len();
        for s in 0..7 {
            if s == 6 {
                // Last stage is evaluated at the fifth-order solution.
                for j in 0..n {
                    let mut acc = y[j];
                    for (r, a) in A[6].iter().enumerate() {
                        acc += h * a * self.k[r][j];
                    }
                    out[j] = acc;
                }
                self.tmp.copy_from_slice(out);
            } else {
                for j in 0..n {
                    let mut acc = y[j];
                    for r in 0..s {
                        acc += h * A[s][r] * self.k[r][j];
                    }
                    self.tmp[j] = acc;
                }
            }
            rhs(t + C[s] * h, &self.tmp, &mut self.k[s]);
        }
        let mut worst = 0.0f64;
        for j in 0..n {
            let mut e = 0.0;
            for (r, w) in E.iter().enumerate() {
                e += w * self.k[r][j];
            }
            let sc = atol + rtol * y[j].abs().max(out[j].abs());
            let ratio = (h * e).abs() / sc;
            if ratio.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(ratio);
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quintic_solution_is_exact() {
        // y = t^5 is reproduced by the fifth-order solution; the quartic
        // y = t^4 by both, so its error estimate vanishes.
        let mut d = Dopri::new(1);
        let mut rhs = |t: f64, _y: &[f64], dy: &mut [f64]| dy[0] = 5.0 * t * t * t * t;
        let mut out = [0.0];
        d.step(&mut rhs, 1.0, &[1.0], 0.5, 1e-12, 1e-300, &mut out);
        assert!((out[0] - 1.5f64 * 1.5 * 1.5 * 1.5 * 1.5).abs() < 1e-13);
        let mut rhs = |t: f64, _y: &[f64], dy: &mut [f64]| dy[0] = 4.0 * t * t * t;
        let err = d.step(&mut rhs, 1.0, &[1.0], 0.5, 1e-12, 1e-300, &mut out);
        assert!((out[0] - 1.5f64 * 1.5 * 1.5 * 1.5).abs() < 1e-13);
        assert!(err < 1.0, "{err}");
    }

    #[test]
    fn exponential_local_error() {
        let mut d = Dopri::new(1);
        let mut rhs = |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0];
        let mut out = [0.0];
        let h = 0.1;
        d.step(&mut rhs, 0.0, &[1.0], h, 1e-12, 1e-300, &mut out);
        assert!((out[0] - libm::exp(h)).abs() < 1e-8);
        let mut small = [0.0];
        d.step(&mut rhs, 0.0, &[1.0], h / 2.0, 1e-12, 1e-300, &mut small);
        let ratio = (out[0] - libm::exp(h)).abs() / (small[0] - libm::exp(h / 2.0)).abs();
        assert!(ratio > 30.0, "local error should scale like h^6, ratio {ratio}");
    }

    #[test]
    fn nan_is_reported() {
        let mut d = Dopri::new(1);
        let mut rhs = |_t: f64, _y: &[f64], dy: &mut [f64]| dy[0] = f64::NAN;
        let mut out = [0.0];
        assert!(d.step(&mut rhs, 0.0, &[1.0], 0.1, 1e-12, 1e-300, &mut out).is_nan());
    }
}
