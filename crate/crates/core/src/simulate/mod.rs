//! Numerical engine: extremal and closed-loop bang-bang integration with
//! event-localized switching, chatter fitting and junction estimates.

mod chatter;
mod dopri;
mod engine;
mod junction;
mod scan;

pub use chatter::{fit_chatter, fit_intervals, ChatterReport, InputChatter};
pub use engine::{integrate_extremal, max_abs_hamiltonian, simulate_feedback, FeedbackLaw, SwitchingSurface};
pub use junction::{estimate_junction, JunctionEstimate, DEFAULT_JUMP_TOL};
pub use scan::{scan_switching_gain, GainScan};

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::liecone::LieError;
use crate::polyalg::PolyError;
use crate::system::{ExtremalPoint, SystemError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("{what}: expected length {expected}, got {got}")]
    Dim { what: &'static str, expected: usize, got: usize },
    #[error("the multiplier and the state adjoint are both zero")]
    ZeroMultiplier,
    #[error("option {0} must be strictly positive and finite")]
    BadOption(&'static str),
    #[error("feedback law has {got} surfaces for {expected} inputs")]
    LawInputs { expected: usize, got: usize },
    #[error("switching surface {input}: {msg}")]
    Surface { input: usize, msg: String },
    #[error("insufficient switches: at least 6 events on one input are needed, the busiest input has {best}")]
    InsufficientSwitches { best: usize },
    #[error("t_c = {t_c} is too close to the trajectory boundary for one-sided estimates")]
    JunctionAtBoundary { t_c: f64 },
    #[error("input index {index} out of range for {inputs} inputs")]
    InputIndex { index: usize, inputs: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// One control switch: `direction` is the new sign of the switching
/// function of `input_index`.
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchEvent {
    pub t: f64,
    pub input_index: usize,
    pub direction: i8,
    pub phi_slope: f64,
}

/// A sign change of a switching function whose slope was below the grazing
/// threshold; the control was kept.
#[derive(Clone, Debug, PartialEq)]
pub struct GrazingContact {
    pub t: f64,
    pub input_index: usize,
    pub phi_slope: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    Horizon,
    ZenoFloor,
    TargetBall,
    Error(String),
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::Horizon => "horizon",
            Termination::ZenoFloor => "zeno-floor",
            Termination::TargetBall => "target-ball",
            Termination::Error(_) => "error",
        }
    }
}

/// Samples carry `p` in extremal mode; in feedback mode `p` is empty and `z`
/// is the cost-augmented state.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<ExtremalPoint>,
    pub events: Vec<SwitchEvent>,
    pub grazing: Vec<GrazingContact>,
    pub terminated_by: Termination,
}

impl Trajectory {
    pub fn last_time(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    pub fn events_for(&self, input: usize) -> impl Iterator<Item = &SwitchEvent> {
        self.events.iter().filter(move |e| e.input_index == input)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimOptions {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    /// Bisection width for event times.
    pub tol_event: f64,
    /// Relative slope below which a sign change counts as grazing.
    pub tol_graze: f64,
    /// Smallest admissible interval between two switches of one input.
    pub zeno_floor: f64,
    /// Feedback runs stop once the state norm is at most this; `0` disables.
    pub target_radius: f64,
    pub max_steps: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            rtol: 1e-12,
            atol: 1e-250,
            initial_step: 1e-3,
            max_step: 1e-2,
            tol_event: 1e-14,
            tol_graze: 1e-6,
            zeno_floor: 1e-10,
            target_radius: 1e-6,
            max_steps: 5_000_000,
        }
    }
}

impl SimOptions {
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("initial_step", self.initial_step),
            ("max_step", self.max_step),
            ("tol_event", self.tol_event),
            ("tol_graze", self.tol_graze),
            ("zeno_floor", self.zeno_floor),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(SimError::BadOption(name));
        }
        if !(self.target_radius.is_finite() && self.target_radius >= 0.0) {
            return Err(SimError::BadOption("target_radius"));
        }
        Ok(())
    }
}
