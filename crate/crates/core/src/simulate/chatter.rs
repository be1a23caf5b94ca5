//! Geometric fit of switch intervals.

use alloc::vec::Vec;

use super::{SimError, Trajectory};

/// Minimum number of switches on an input before a ratio is reported.
pub const MIN_SWITCHES: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct InputChatter {
    pub input_index: usize,
    pub switch_times: Vec<f64>,
    pub intervals: Vec<f64>,
    pub switch_count: usize,
    /// `exp` of the least-squares slope of `log d_j` against `j`.
    pub rho: Option<f64>,
    pub fit_r2: Option<f64>,
    pub accumulation: bool,
    /// `t_s + d_s ρ / (1 - ρ)` when `0 < ρ < 1`.
    pub accumulation_time: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChatterReport {
    pub inputs: Vec<InputChatter>,
}

impl ChatterReport {
    pub fn accumulation(&self) -> bool {
        self.inputs.iter().any(|c| c.accumulation)
    }
}

/// Least-squares line through `(j, log d_j)`: returns `(ρ, r²)`.
pub fn fit_intervals(intervals: &[f64]) -> Option<(f64, f64)> {
    if intervals.len() < 2 || intervals.iter().any(|d| !(*d > 0.0)) {
        return None;
    }
    let ys: Vec<f64> = intervals.iter().map(|d| libm::log(*d)).collect();
    let n = ys.len() as f64;
    let xbar = (n - 1.0) / 2.0;
    let ybar = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (j, y) in ys.iter().enumerate() {
        let dx = j as f64 - xbar;
        sxy += dx * (y - ybar);
        sxx += dx * dx;
    }
    let slope = sxy / sxx;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for (j, y) in ys.iter().enumerate() {
        let fit = ybar + slope * (j as f64 - xbar);
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - ybar) * (y - ybar);
    }
    // A flat series is fitted exactly by a flat line.
    let r2 = if ss_tot <= 1e-300 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Some((libm::exp(slope), r2))
}

/// Per-input interval statistics of a run. The accumulation flag needs
/// `ρ < 1 - 1e-3` and `r² ≥ 0.99`.
pub fn fit_chatter(traj: &Trajectory) -> Result<ChatterReport, SimError> {
    let inputs = traj.events.iter().map(|e| e.input_index + 1).max().unwrap_or(0);
    let mut out = Vec::with_capacity(inputs);
    for i in 0..inputs {
        let switch_times: Vec<f64> = traj.events_for(i).map(|e| e.t).collect();
        let intervals: Vec<f64> = switch_times.windows(2).map(|w| w[1] - w[0]).collect();
        let switch_count = switch_times.len();
        let fit = if switch_count >= MIN_SWITCHES { fit_intervals(&intervals) } else { None };
        let (rho, fit_r2) = match fit {
            Some((r, q)) => (Some(r), Some(q)),
            None => (None, None),
        };
        let accumulation = matches!(fit, Some((r, q)) if r < 1.0 - 1e-3 && q >= 0.99);
        let accumulation_time = match (rho, switch_times.last(), intervals.last()) {
            (Some(r), Some(ts), Some(ds)) if r > 0.0 && r < 1.0 => Some(ts + ds * r / (1.0 - r)),
            _ => None,
        };
        out.push(InputChatter { input_index: i, switch_times, intervals, switch_count, rho, fit_r2, accumulation, accumulation_time });
    }
    let best = out.iter().map(|c| c.switch_count).max().unwrap_or(0);
    if best < MIN_SWITCHES {
        return Err(SimError::InsufficientSwitches { best });
    }
    Ok(ChatterReport { inputs: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{SwitchEvent, Termination};
    use alloc::vec;

    fn traj_from_times(times: &[f64]) -> Trajectory {
        let events = times
            .iter()
            .enumerate()
            .map(|(j, &t)| SwitchEvent { t, input_index: 0, direction: if j % 2 == 0 { -1 } else { 1 }, phi_slope: 1.0 })
            .collect();
        Trajectory { samples: vec![], events, grazing: vec![], terminated_by: Termination::Horizon }
    }

    #[test]
    fn exact_geometric_intervals() {
        let mut t = 0.0;
        let mut times = vec![t];
        for j in 0..10 {
            t += libm::pow(0.5, j as f64);
            times.push(t);
        }
        let rep = fit_chatter(&traj_from_times(&times)).unwrap();
        let c = &rep.inputs[0];
        assert!((c.rho.unwrap() - 0.5).abs() < 1e-12);
        assert!((c.fit_r2.unwrap() - 1.0).abs() < 1e-12);
        assert!(c.accumulation);
        assert!((c.accumulation_time.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_intervals_do_not_accumulate() {
        let times: Vec<f64> = (0..12).map(|j| j as f64 * 0.7).collect();
        let rep = fit_chatter(&traj_from_times(&times)).unwrap();
        let c = &rep.inputs[0];
        assert!((c.rho.unwrap() - 1.0).abs() < 1e-12);
        assert!(!c.accumulation);
        assert!(c.accumulation_time.is_none());
        assert!(!rep.accumulation());
    }

    #[test]
    fn too_few_switches() {
        assert_eq!(fit_chatter(&traj_from_times(&[0.0, 1.0, 1.5])), Err(SimError::InsufficientSwitches { best: 3 }));
    }
}
