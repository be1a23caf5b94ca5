//! The `simulate` and `chatter` commands.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use fullerlab_core::polyalg::parse_poly;
use fullerlab_core::simulate::{
    fit_chatter, integrate_extremal, scan_switching_gain, simulate_feedback, ChatterReport, FeedbackLaw, GainScan, InputChatter, SimError, SwitchingSurface, Termination, Trajectory,
};
use fullerlab_core::system::AffineSystem;
use serde::Serialize;

use crate::config::{Mode, RunConfig};
use crate::format::{read_events_csv, write_events_csv, write_json, write_trajectory_csv, FieldError};

/// β grid used when no gain is given for a single-input double integrator.
pub const SCAN_GRID: (f64, f64, f64) = (0.05, 1.5, 0.005);

#[derive(Serialize)]
pub struct InputChatterJson {
    pub input_index: usize,
    pub switch_count: usize,
    pub rho: Option<f64>,
    pub fit_r2: Option<f64>,
    pub accumulation: bool,
    pub accumulation_time: Option<f64>,
    pub switch_times: Vec<f64>,
    pub intervals: Vec<f64>,
}

#[derive(Serialize)]
pub struct ChatterJson {
    pub accumulation: bool,
    /// Why no ratio was fitted, when too few switches were seen.
    pub note: Option<String>,
    pub inputs: Vec<InputChatterJson>,
}

/// [`fit_chatter`], except that too few switches yield unfitted statistics
/// and a note instead of an error.
pub fn chatter_report(traj: &Trajectory) -> anyhow::Result<(ChatterReport, Option<String>)> {
    match fit_chatter(traj) {
        Ok(r) => Ok((r, None)),
        Err(e @ SimError::InsufficientSwitches { .. }) => {
            let inputs = traj.events.iter().map(|e| e.input_index + 1).max().unwrap_or(0);
            let inputs = (0..inputs)
                .map(|i| {
                    let switch_times: Vec<f64> = traj.events_for(i).map(|e| e.t).collect();
                    InputChatter {
                        input_index: i,
                        intervals: switch_times.windows(2).map(|w| w[1] - w[0]).collect(),
                        switch_count: switch_times.len(),
                        switch_times,
                        rho: None,
                        fit_r2: None,
                        accumulation: false,
                        accumulation_time: None,
                    }
                })
                .collect();
            Ok((ChatterReport { inputs }, Some(e.to_string())))
        }
        Err(e) => Err(e.into()),
    }
}

impl ChatterJson {
    fn new(r: &ChatterReport, note: Option<String>) -> Self {
        let input = |c: &InputChatter| InputChatterJson {
            input_index: c.input_index,
            switch_count: c.switch_count,
            rho: c.rho,
            fit_r2: c.fit_r2,
            accumulation: c.accumulation,
            accumulation_time: c.accumulation_time,
            switch_times: c.switch_times.clone(),
            intervals: c.intervals.clone(),
        };
        ChatterJson { accumulation: r.accumulation(), note, inputs: r.inputs.iter().map(input).collect() }
    }
}

#[derive(Serialize)]
pub struct ScanJson {
    pub best_beta: f64,
    pub best_cost: f64,
    /// `[β, cost]`; a null cost marks a discarded run.
    pub costs: Vec<(f64, Option<f64>)>,
}

impl From<&GainScan> for ScanJson {
    fn from(s: &GainScan) -> Self {
        ScanJson { best_beta: s.best_beta, best_cost: s.best_cost, costs: s.costs.clone() }
    }
}

#[derive(Serialize)]
pub struct RunSummary {
    pub event_count: usize,
    pub grazing_count: usize,
    pub terminated_by: &'static str,
    pub error: Option<String>,
    pub last_time: f64,
    /// Gain actually used by a feedback run of the Fuller family.
    pub beta: Option<f64>,
}

#[derive(Serialize)]
pub struct ChatterOutput {
    pub config: RunConfig,
    pub run: Option<RunSummary>,
    pub scan: Option<ScanJson>,
    pub chatter: ChatterJson,
}

/// A finished simulation with everything needed for the output files.
pub struct SimRun {
    pub traj: Trajectory,
    pub scan: Option<GainScan>,
    pub beta: Option<f64>,
}

fn feedback_law(config: &RunConfig, sys: &AffineSystem, x0: &[f64]) -> anyhow::Result<(FeedbackLaw, Option<GainScan>, Option<f64>)> {
    let n = sys.state_dim();
    let m = sys.inputs();
    if !config.surfaces.is_empty() {
        if config.surfaces.len() != m {
            return Err(FieldError::new("--surface", format!("{} surfaces for {m} inputs", config.surfaces.len())).into());
        }
        let surfaces = config
            .surfaces
            .iter()
            .map(|s| parse_poly(s, n).map(SwitchingSurface::Polynomial).map_err(|e| FieldError::new("--surface", e.to_string())))
            .collect::<Result<_, _>>()?;
        return Ok((FeedbackLaw { surfaces }, None, None));
    }
    if n != 2 * m {
        return Err(FieldError::new("--surface", format!("no default switching curves for {n} states and {m} inputs; give one --surface per input")).into());
    }
    let (beta, scan) = match config.beta {
        Some(b) => (b, None),
        None if m == 1 => {
            let (lo, hi, step) = SCAN_GRID;
            let scan = scan_switching_gain(sys, x0, lo, hi, step, config.numeric.horizon, &config.sim_options()).context("gain scan")?;
            (scan.best_beta, Some(scan))
        }
        None => return Err(FieldError::new("--beta", "the gain scan needs a single input; pass --beta or --surface").into()),
    };
    let surfaces = (0..m).map(|i| SwitchingSurface::FullerCurve { position: i, velocity: m + i, beta }).collect();
    Ok((FeedbackLaw { surfaces }, scan, Some(beta)))
}

pub fn simulate_run(config: &RunConfig, sys: &AffineSystem) -> anyhow::Result<SimRun> {
    let x0 = config.x0.clone().expect("resolved with the problem");
    let opts = config.sim_options();
    let horizon = config.numeric.horizon;
    match config.mode {
        Mode::Extremal => {
            let p0 = config.p0.clone().expect("resolved with the problem");
            let mut z0 = vec![0.0];
            z0.extend_from_slice(&x0);
            let traj = integrate_extremal(&sys.augment(), &z0, &p0, config.lambda, horizon, &opts)?;
            Ok(SimRun { traj, scan: None, beta: None })
        }
        Mode::Feedback => {
            let (law, scan, beta) = feedback_law(config, sys, &x0)?;
            let traj = simulate_feedback(sys, &law, &x0, horizon, &opts)?;
            Ok(SimRun { traj, scan, beta })
        }
    }
}

fn summary(run: &SimRun) -> RunSummary {
    RunSummary {
        event_count: run.traj.events.len(),
        grazing_count: run.traj.grazing.len(),
        terminated_by: run.traj.terminated_by.label(),
        error: match &run.traj.terminated_by {
            Termination::Error(msg) => Some(msg.clone()),
            _ => None,
        },
        last_time: run.traj.last_time(),
        beta: run.beta,
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |v| format!("{v:.6}"))
}

/// One line: event count, termination, per-input ρ and r², accumulation.
pub fn summary_line(run: &SimRun, report: &ChatterReport) -> String {
    let rho: Vec<String> = report.inputs.iter().map(|c| opt(c.rho)).collect();
    let r2: Vec<String> = report.inputs.iter().map(|c| opt(c.fit_r2)).collect();
    let or_na = |v: Vec<String>| if v.is_empty() { "n/a".to_string() } else { v.join(",") };
    format!(
        "events={} terminated_by={} t_end={:.6e} rho={} fit_r2={} accumulation={}",
        run.traj.events.len(),
        run.traj.terminated_by.label(),
        run.traj.last_time(),
        or_na(rho),
        or_na(r2),
        report.accumulation()
    )
}

fn integration_failure(run: &SimRun) -> anyhow::Result<()> {
    if let Termination::Error(msg) = &run.traj.terminated_by {
        bail!("integration failed at t = {:.16e} (last valid time): {msg}", run.traj.last_time());
    }
    Ok(())
}

fn out_dir(config: &RunConfig) -> anyhow::Result<PathBuf> {
    let dir = config.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

/// Writes `trajectory.csv`, `events.csv` and `chatter.json`; returns the
/// summary line.
pub fn cmd_simulate(config: RunConfig, sys: &AffineSystem) -> anyhow::Result<String> {
    let run = simulate_run(&config, sys)?;
    let (report, note) = chatter_report(&run.traj)?;
    let dir = out_dir(&config)?;
    write_trajectory_csv(&dir.join("trajectory.csv"), &run.traj, sys.state_dim() + 1, sys.inputs())?;
    write_events_csv(&dir.join("events.csv"), &run.traj.events)?;
    let line = summary_line(&run, &report);
    let out = ChatterOutput { run: Some(summary(&run)), scan: run.scan.as_ref().map(ScanJson::from), chatter: ChatterJson::new(&report, note), config };
    write_json(&dir.join("chatter.json"), &out)?;
    integration_failure(&run)?;
    Ok(line)
}

/// Fits an events CSV, or a fresh run when no CSV is given.
pub fn cmd_chatter(config: RunConfig, sys: Option<&AffineSystem>) -> anyhow::Result<ChatterOutput> {
    if let Some(path) = &config.events {
        let events = read_events_csv(Path::new(path)).with_context(|| format!("reading {}", path.display()))?;
        let traj = Trajectory { samples: Vec::new(), events, grazing: Vec::new(), terminated_by: Termination::Horizon };
        let (report, note) = chatter_report(&traj)?;
        return Ok(ChatterOutput { run: None, scan: None, chatter: ChatterJson::new(&report, note), config });
    }
    let Some(sys) = sys else {
        return Err(FieldError::new("problem", "chatter needs a problem or --events").into());
    };
    let run = simulate_run(&config, sys)?;
    integration_failure(&run)?;
    let (report, note) = chatter_report(&run.traj)?;
    Ok(ChatterOutput { run: Some(summary(&run)), scan: run.scan.as_ref().map(ScanJson::from), chatter: ChatterJson::new(&report, note), config })
}
