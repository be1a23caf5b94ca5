//! Grid search over the gain of the Fuller switching-curve family.

use alloc::vec::Vec;

use super::{simulate_feedback, FeedbackLaw, SimError, SimOptions, Termination};
use crate::system::AffineSystem;

/// Runs that hit the Zeno floor farther than this from the origin are
/// sliding along the curve rather than converging, and are discarded.
const FAR_FROM_ORIGIN: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct GainScan {
    pub best_beta: f64,
    pub best_cost: f64,
    /// `(β, cost)`; `None` marks a discarded run.
    pub costs: Vec<(f64, Option<f64>)>,
}

/// Minimizes the simulated cost of `s = x + β v|v|` over
/// `β = lo, lo + step, ..., hi`.
pub fn scan_switching_gain(sys: &AffineSystem, x0: &[f64], lo: f64, hi: f64, step: f64, horizon: f64, opts: &SimOptions) -> Result<GainScan, SimError> {
    if !(step > 0.0 && lo <= hi) {
        return Err(SimError::BadOption("beta grid"));
    }
    let count = libm::round((hi - lo) / step) as usize + 1;
    let mut costs = Vec::with_capacity(count);
    let mut best: Option<(f64, f64)> = None;
    for j in 0..count {
        let beta = lo + step * j as f64;
        let tr = simulate_feedback(sys, &FeedbackLaw::fuller_curve(beta), x0, horizon, opts)?;
        let last = tr.samples.last().expect("runs record their initial point");
        let dist = libm::sqrt(last.z[1..].iter().map(|v| v * v).sum());
        let keep = match tr.terminated_by {
            Termination::Error(_) => false,
            Termination::ZenoFloor => dist <= FAR_FROM_ORIGIN,
            _ => true,
        };
        let cost = keep.then_some(last.z[0]);
        if let Some(c) = cost {
            if best.is_none_or(|(_, b)| c < b) {
                best = Some((beta, c));
            }
        }
        costs.push((beta, cost));
    }
    let (best_beta, best_cost) = best.ok_or(SimError::BadOption("beta grid (every run discarded)"))?;
    Ok(GainScan { best_beta, best_cost, costs })
}
