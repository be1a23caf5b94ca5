//! Command-line grammar and the resolved run configuration embedded in every
//! output.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fullerlab_core::polyalg::parse_poly;
use fullerlab_core::problems::{fuller_classic, fuller_multi, hamiltonian_family, time_optimal_di};
use fullerlab_core::simulate::SimOptions;
use fullerlab_core::system::AffineSystem;
use serde::Serialize;

use crate::format::{parse_floats, parse_matrix, problem_from_json, FieldError};

#[derive(Parser, Debug, Clone)]
#[command(name = "fullerlab", version, about = "Singular arcs, chattering and the Fuller phenomenon for control-affine problems")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Derivative ladder, Legendre–Clebsch test, cone and chattering certificate.
    Analyze(ProblemCmd),
    /// Integrate an extremal or a feedback law and write trajectory, events and chatter data.
    Simulate(ProblemCmd),
    /// Geometric fit of switch intervals, from a fresh run or an events CSV.
    Chatter(ProblemCmd),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::Simulate(_) => "simulate",
            Command::Chatter(_) => "chatter",
        }
    }

    pub fn problem(&self) -> Option<&ProblemArg> {
        match self {
            Command::Analyze(p) | Command::Simulate(p) | Command::Chatter(p) => p.problem.as_ref(),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ProblemCmd {
    #[command(subcommand)]
    pub problem: Option<ProblemArg>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum ProblemArg {
    /// Minimize the integral of x²/2 for the double integrator with |u| ≤ 1.
    FullerClassic,
    /// Multi-input Fuller problem with matrices M1 (SPD) and M2 (symmetric invertible).
    FullerMulti {
        /// `I`, `I<n>`, an inline JSON array of rows, or a JSON file.
        #[arg(long)]
        m1: String,
        #[arg(long)]
        m2: String,
        /// Size of a bare `I`.
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Mechanical family with kinetic matrix T, input matrix M, potential Q and running cost c.
    Hamiltonian {
        #[arg(long)]
        t: String,
        #[arg(long)]
        m: String,
        /// Polynomial in the position variables x0.. (default 0).
        #[arg(long, default_value = "0")]
        q: String,
        /// Polynomial in the position variables x0.. (default |x|²/2).
        #[arg(long)]
        c: Option<String>,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Minimum-time double integrator.
    TimeOptimalDi,
    /// A problem JSON file {n, m, f, g, f0, g0, K}.
    File { path: PathBuf },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Extremal,
    Feedback,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the randomized cone sample points.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1e-14)]
    pub tol_event: f64,
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub zeno_floor: f64,
    #[arg(long, global = true, default_value_t = 10.0)]
    pub horizon: f64,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Feedback)]
    pub mode: Mode,
    /// Gain of the switching curves x_i + β v_i|v_i|; scanned when absent.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Initial state, comma-separated (default e_0).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Initial state adjoint for extremal runs, comma-separated (default all -1).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub p0: Option<String>,
    /// Cost multiplier for extremal runs.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub lambda: f64,
    /// Feedback runs stop inside this state-norm ball; 0 disables.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub target: f64,
    /// Switching surface polynomial over x0.., one per input (repeatable).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub surface: Vec<String>,
    /// Legendre–Clebsch sample point `z0,..,zN-1;p0,..,pN-1` (repeatable).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub point: Vec<String>,
    /// Candidate singular point over the augmented state (default origin).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub candidate: Option<String>,
    /// Deepest ladder rung searched.
    #[arg(long, global = true, default_value_t = fullerlab_core::liecone::DEFAULT_MAX_DEPTH)]
    pub max_depth: usize,
    /// Events CSV to fit (chatter only).
    #[arg(long, global = true)]
    pub events: Option<PathBuf>,
}

/// A built-in name with its parameters, or a JSON path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProblemSource {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericOptions {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub tol_event: f64,
    pub tol_graze: f64,
    pub zeno_floor: f64,
    pub target_radius: f64,
    pub max_steps: usize,
    pub horizon: f64,
    pub max_depth: usize,
}

/// Everything a run depends on, with defaults filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub problem: Option<ProblemSource>,
    pub numeric: NumericOptions,
    pub mode: Mode,
    pub beta: Option<f64>,
    pub x0: Option<Vec<f64>>,
    pub p0: Option<Vec<f64>>,
    pub lambda: f64,
    pub surfaces: Vec<String>,
    pub points: Vec<String>,
    /// Candidate singular point over the augmented state.
    pub candidate: Option<Vec<f64>>,
    pub events: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl RunConfig {
    pub fn sim_options(&self) -> SimOptions {
        let n = &self.numeric;
        SimOptions {
            rtol: n.rtol,
            atol: n.atol,
            initial_step: n.initial_step,
            max_step: n.max_step,
            tol_event: n.tol_event,
            tol_graze: n.tol_graze,
            zeno_floor: n.zeno_floor,
            target_radius: n.target_radius,
            max_steps: n.max_steps,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), FieldError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(FieldError::new(name, format!("must be strictly positive and finite, got {v}")))
    }
}

/// Loads the problem and resolves the defaults that depend on its dimensions.
pub fn resolve(cli: &Cli) -> Result<(RunConfig, Option<AffineSystem>), FieldError> {
    let o = &cli.opts;
    positive("--tol-event", o.tol_event)?;
    positive("--zeno-floor", o.zeno_floor)?;
    positive("--horizon", o.horizon)?;
    if !(o.target.is_finite() && o.target >= 0.0) {
        return Err(FieldError::new("--target", "must be non-negative and finite"));
    }
    if !o.lambda.is_finite() {
        return Err(FieldError::new("--lambda", "must be finite"));
    }
    if let Some(b) = o.beta {
        if !b.is_finite() {
            return Err(FieldError::new("--beta", "must be finite"));
        }
    }
    let loaded = cli.command.problem().map(load_problem).transpose()?;
    let (source, sys) = match loaded {
        Some((s, p)) => (Some(s), Some(p)),
        None => (None, None),
    };
    let n = sys.as_ref().map(AffineSystem::state_dim);
    let vector = |s: &Option<String>, field: &str, default: Option<Vec<f64>>| -> Result<Option<Vec<f64>>, FieldError> {
        let v = match s {
            Some(s) => Some(parse_floats(s, field)?),
            None => default,
        };
        if let (Some(v), Some(n)) = (&v, n) {
            if v.len() != n {
                return Err(FieldError::new(field, format!("expected {n} components, got {}", v.len())));
            }
        }
        Ok(v)
    };
    let x0 = vector(&o.x0, "--x0", n.map(|n| (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect()))?;
    let p0 = vector(&o.p0, "--p0", n.map(|n| vec![-1.0; n]))?;
    let candidate = match &o.candidate {
        Some(s) => {
            let c = parse_floats(s, "--candidate")?;
            if let Some(n) = n {
                if c.len() != n + 1 {
                    return Err(FieldError::new("--candidate", format!("expected {} components, got {}", n + 1, c.len())));
                }
            }
            Some(c)
        }
        None => n.map(|n| vec![0.0; n + 1]),
    };
    let d = SimOptions::default();
    let numeric = NumericOptions {
        rtol: d.rtol,
        atol: d.atol,
        initial_step: d.initial_step,
        max_step: d.max_step,
        tol_event: o.tol_event,
        tol_graze: d.tol_graze,
        zeno_floor: o.zeno_floor,
        target_radius: o.target,
        max_steps: d.max_steps,
        horizon: o.horizon,
        max_depth: o.max_depth,
    };
    let config = RunConfig {
        command: cli.command.name().to_string(),
        problem: source,
        numeric,
        mode: o.mode,
        beta: o.beta,
        x0,
        p0,
        lambda: o.lambda,
        surfaces: o.surface.clone(),
        points: o.point.clone(),
        candidate,
        events: o.events.clone(),
        out: o.out.clone(),
        seed: o.seed,
    };
    Ok((config, sys))
}

fn load_problem(arg: &ProblemArg) -> Result<(ProblemSource, AffineSystem), FieldError> {
    let mut params = BTreeMap::new();
    let (name, sys) = match arg {
        ProblemArg::FullerClassic => ("fuller-classic", fuller_classic()),
        ProblemArg::FullerMulti { m1, m2, n } => {
            params.insert("m1".into(), m1.clone());
            params.insert("m2".into(), m2.clone());
            params.insert("n".into(), n.to_string());
            let a = parse_matrix(m1, *n, "--m1")?;
            let b = parse_matrix(m2, *n, "--m2")?;
            ("fuller-multi", fuller_multi(&a, &b).map_err(|e| FieldError::new("fuller-multi", e.to_string()))?)
        }
        ProblemArg::Hamiltonian { t, m, q, c, n } => {
            let tm = parse_matrix(t, *n, "--t")?;
            let mm = parse_matrix(m, *n, "--m")?;
            let d = tm.nrows();
            let c_text = c.clone().unwrap_or_else(|| (0..d).map(|i| format!("1/2 * x{i}^2")).collect::<Vec<_>>().join(" + "));
            params.insert("t".into(), t.clone());
            params.insert("m".into(), m.clone());
            params.insert("q".into(), q.clone());
            params.insert("c".into(), c_text.clone());
            params.insert("n".into(), n.to_string());
            let qp = parse_poly(q, d).map_err(|e| FieldError::new("--q", e.to_string()))?;
            let cp = parse_poly(&c_text, d).map_err(|e| FieldError::new("--c", e.to_string()))?;
            ("hamiltonian", hamiltonian_family(&tm, &mm, &qp, &cp).map_err(|e| FieldError::new("hamiltonian", e.to_string()))?)
        }
        ProblemArg::TimeOptimalDi => ("time-optimal-di", time_optimal_di()),
        ProblemArg::File { path } => {
            params.insert("path".into(), path.display().to_string());
            let text = std::fs::read_to_string(path).map_err(|e| FieldError::new("file", format!("cannot read {}: {e}", path.display())))?;
            ("file", problem_from_json(&text)?)
        }
    };
    Ok((ProblemSource { name: name.into(), params }, sys))
}
