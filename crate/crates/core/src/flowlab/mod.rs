//! Explicit time stepping of the four locally constrained curvature flows
//! on radial representations, with monitored functionals.

mod monitor;

pub use monitor::{
    heintze_karcher_gap, monitor_rhs, monitor_value, Claim, MonitorId, MonitorRequest, MonitorSeries, Series,
    Verdict, DRIFT_TOL,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::axisym::sigma_axisym;
pub use crate::shape::{Geometry, Shape};
use crate::error::{Error, Result};
use crate::spaceform::{SpaceForm, Weight};
use crate::symfun::binomial;

/// Stationarity tolerance: stop once `max|F| ≤ STOP_TOL · max ρ`.
pub const STOP_TOL: f64 = 1e-10;
/// CFL safety factor for spectral differentiation (curves).
pub const CFL_SPECTRAL: f64 = 0.2;
/// CFL safety factor for fourth-order differences (hypersurfaces).
pub const CFL_FD4: f64 = 0.25;

/// One of the four flows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "flow", rename_all = "kebab-case")]
pub enum FlowKind {
    /// `F = φ'/κ - u` on curves in `M²(K)`.
    CurveLp,
    /// `F = H_{k-1}/H_k - u` in `Rⁿ`.
    ImcfK { k: usize },
    /// `F = φ'/H - u/(n-1)` in `Hⁿ`.
    HypMean,
    /// `F = (n-1)/H - u/φ'` in `Sⁿ`.
    SphMean,
}

impl FlowKind {
    pub fn id(&self) -> String {
        match self {
            FlowKind::CurveLp => "curve-lp".into(),
            FlowKind::ImcfK { k } => format!("imcf-k:{k}"),
            FlowKind::HypMean => "hyp-mean".into(),
            FlowKind::SphMean => "sph-mean".into(),
        }
    }

    /// Parses `curve-lp`, `imcf-k` (with `k`), `hyp-mean`, `sph-mean`.
    pub fn parse(name: &str, k: Option<usize>) -> Result<FlowKind> {
        let (base, inline_k) = match name.split_once(':') {
            Some((b, k)) => (
                b,
                Some(k.parse::<usize>().map_err(|_| Error::InvalidArgument(format!("bad k in `{name}`")))?),
            ),
            None => (name, None),
        };
        match base {
            "curve-lp" => Ok(FlowKind::CurveLp),
            "imcf-k" => Ok(FlowKind::ImcfK { k: inline_k.or(k).unwrap_or(1) }),
            "hyp-mean" => Ok(FlowKind::HypMean),
            "sph-mean" => Ok(FlowKind::SphMean),
            other => Err(Error::InvalidArgument(format!("unknown flow `{other}`"))),
        }
    }

    /// Checks the flow/space/dimension pairing.
    pub fn check_compatible(&self, space: SpaceForm, n: usize) -> Result<()> {
        let bad = |why: &str| Err(Error::InvalidArgument(format!("flow {} {why}", self.id())));
        match *self {
            FlowKind::CurveLp if n != 2 => bad("runs on curves only (n = 2)"),
            FlowKind::ImcfK { .. } if space.curvature() != 0 => bad("requires K = 0"),
            FlowKind::ImcfK { k } if k < 1 || k + 1 > n => bad(&format!("needs 1 <= k <= n - 1, got k = {k}")),
            FlowKind::ImcfK { .. } if n < 3 => bad("runs on hypersurfaces (n >= 3)"),
            FlowKind::HypMean if space.curvature() != -1 => bad("requires K = -1"),
            FlowKind::SphMean if space.curvature() != 1 => bad("requires K = 1"),
            FlowKind::HypMean | FlowKind::SphMean if n < 3 => bad("runs on hypersurfaces (n >= 3)"),
            _ => Ok(()),
        }
    }

    /// Monitors and direction claims established for this flow.
    pub fn default_monitors(&self) -> Vec<MonitorRequest> {
        use Claim::*;
        match *self {
            FlowKind::CurveLp => vec![
                MonitorRequest::new(MonitorId::Length, Constant),
                MonitorRequest::new(MonitorId::Weighted2d, Nonincreasing),
            ],
            FlowKind::ImcfK { k } => {
                let mut v: Vec<MonitorRequest> = (-1..k as i32)
                    .map(|l| MonitorRequest::new(MonitorId::Quermass(l), Nondecreasing))
                    .collect();
                v.push(MonitorRequest::new(MonitorId::WeightedRn(k), Nonincreasing));
                v
            }
            FlowKind::HypMean => vec![
                MonitorRequest::new(MonitorId::Area, Constant),
                MonitorRequest::new(MonitorId::WeightedH, Nonincreasing),
            ],
            FlowKind::SphMean => vec![
                MonitorRequest::new(MonitorId::SphPhiVol, Nondecreasing),
                MonitorRequest::new(MonitorId::WeightedH, Nonincreasing),
            ],
        }
    }

    /// Pointwise speed from the principal curvatures (`κ₂` has
    /// multiplicity `n - 2`; ignored for curves).
    pub fn speed(&self, n: usize, k1: f64, k2: f64, dphi: f64, u: f64) -> f64 {
        let m = n - 1;
        let h = |k: usize| sigma_axisym(k, k1, k2, m) / binomial(m, k);
        match *self {
            FlowKind::CurveLp => dphi / k1 - u,
            FlowKind::ImcfK { k } => h(k - 1) / h(k) - u,
            FlowKind::HypMean => dphi / sigma_axisym(1, k1, k2, m) - u / (n as f64 - 1.0),
            FlowKind::SphMean => (n as f64 - 1.0) / sigma_axisym(1, k1, k2, m) - u / dphi,
        }
    }

    fn speed_derivatives(&self, n: usize, k1: f64, k2: f64, dphi: f64, u: f64) -> (f64, f64) {
        let d = |a: f64| 1e-6 * (a.abs() + 1e-3);
        let (h1, h2) = (d(k1), d(k2));
        let f1 = (self.speed(n, k1 + h1, k2, dphi, u) - self.speed(n, k1 - h1, k2, dphi, u)) / (2.0 * h1);
        let f2 = if n > 2 {
            (self.speed(n, k1, k2 + h2, dphi, u) - self.speed(n, k1, k2 - h2, dphi, u)) / (2.0 * h2)
        } else {
            0.0
        };
        (f1, f2)
    }

    fn require_class(&self, geom: &Geometry) -> Result<()> {
        match (self, geom) {
            (FlowKind::CurveLp, Geometry::Curve(g)) => g.require_strictly_convex(),
            (FlowKind::ImcfK { k }, Geometry::Axisym(g)) => g.require_k_convex(*k),
            (FlowKind::HypMean, Geometry::Axisym(g)) => {
                let margin = g.convexity().h_convex_margin();
                if margin >= -1e-9 {
                    Ok(())
                } else {
                    Err(Error::Convexity(format!("shape is no longer h-convex (min κ - 1 = {margin:e})")))
                }
            }
            (FlowKind::SphMean, Geometry::Axisym(g)) => {
                let c = g.convexity();
                if c.strictly_convex() {
                    Ok(())
                } else {
                    Err(Error::Convexity(format!("shape is no longer strictly convex (min κ = {:e})", c.min_curvature)))
                }
            }
            _ => Err(Error::InvalidArgument(format!("flow {} does not apply to this shape", self.id()))),
        }
    }
}

impl fmt::Display for FlowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for FlowKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FlowKind::parse(s, None)
    }
}

/// Flow parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSpec {
    pub kind: FlowKind,
    /// Requested step; the actual step is `min(dt, CFL bound)`.
    pub dt: f64,
    pub max_steps: usize,
    /// Optional final time.
    #[serde(default)]
    pub t_max: Option<f64>,
    /// Stationarity tolerance relative to `max ρ`.
    #[serde(default = "default_stop_tol")]
    pub stop_tol: f64,
    /// Explicit midpoint (second order) when true, forward Euler otherwise.
    #[serde(default = "default_true")]
    pub midpoint: bool,
    /// Per-step drift tolerance for monitor verdicts.
    #[serde(default = "default_drift_tol")]
    pub drift_tol: f64,
}

fn default_stop_tol() -> f64 {
    STOP_TOL
}
fn default_true() -> bool {
    true
}
fn default_drift_tol() -> f64 {
    DRIFT_TOL
}

impl FlowSpec {
    pub fn new(kind: FlowKind) -> Self {
        FlowSpec {
            kind,
            dt: 1e-3,
            max_steps: 100_000,
            t_max: None,
            stop_tol: STOP_TOL,
            midpoint: true,
            drift_tol: DRIFT_TOL,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_max_steps(mut self, steps: usize) -> Self {
        self.max_steps = steps;
        self
    }

    pub fn with_t_max(mut self, t: f64) -> Self {
        self.t_max = Some(t);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.stop_tol >= 0.0) || !(self.drift_tol >= 0.0) {
            return Err(Error::InvalidArgument("tolerances must be nonnegative".into()));
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0) {
                return Err(Error::InvalidArgument(format!("t_max must be positive, got {t}")));
            }
        }
        Ok(())
    }
}

/// Normal speed, radial velocity and the stable step bound at one state.
#[derive(Debug, Clone)]
pub struct Velocity {
    pub geometry: Geometry,
    /// normal speed `F`
    pub normal: Vec<f64>,
    /// `ρ_t = F W / φ`
    pub radial: Vec<f64>,
    pub dt_cfl: f64,
}

impl Velocity {
    pub fn max_speed(&self) -> f64 {
        self.normal.iter().fold(0.0, |a, f| a.max(f.abs()))
    }
}

/// Evaluates the flow speed on `shape`, checking the convexity class.
pub fn velocity(shape: &Shape, kind: FlowKind) -> Result<Velocity> {
    let geometry = shape.geometry()?;
    kind.require_class(&geometry)?;
    let n = geometry.n();
    let len = geometry.len();
    let (h, cfl) = match shape {
        Shape::Curve(c) => (2.0 * std::f64::consts::PI / c.n() as f64, CFL_SPECTRAL),
        Shape::Axisym(s) => (s.step(), CFL_FD4),
    };
    let mut normal = Vec::with_capacity(len);
    let mut radial = Vec::with_capacity(len);
    let mut diff_max = 0.0f64;
    for j in 0..len {
        let s = geometry.sample(j);
        let f = kind.speed(n, s.k1, s.k2, s.dphi, s.u);
        if !f.is_finite() {
            return Err(Error::NonFinite(format!("flow speed at sample {j}")));
        }
        let (f1, f2) = kind.speed_derivatives(n, s.k1, s.k2, s.dphi, s.u);
        let d = f1.abs() / (s.speed * s.speed) + f2.abs() / (s.phi * s.phi);
        diff_max = diff_max.max(d);
        normal.push(f);
        radial.push(f * s.speed / s.phi);
    }
    let dt_cfl = if diff_max > 0.0 { cfl * h * h / diff_max } else { f64::INFINITY };
    Ok(Velocity { geometry, normal, radial, dt_cfl })
}

/// Outcome of a single step.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub shape: Shape,
    pub dt: f64,
    /// velocity at the start of the step
    pub start: Velocity,
}

/// Advances `shape` by one step of at most `spec.dt`.
pub fn step(shape: &Shape, spec: &FlowSpec) -> Result<StepResult> {
    let start = velocity(shape, spec.kind)?;
    step_from(shape, spec, start, spec.dt)
}

fn step_from(shape: &Shape, spec: &FlowSpec, start: Velocity, dt_cap: f64) -> Result<StepResult> {
    let dt = dt_cap.min(start.dt_cfl);
    let rho = shape.rho();
    let next = if spec.midpoint {
        let half: Vec<f64> = rho.iter().zip(&start.radial).map(|(r, v)| r + 0.5 * dt * v).collect();
        let mid = velocity(&shape.with_rho(half)?, spec.kind)?;
        rho.iter().zip(&mid.radial).map(|(r, v)| r + dt * v).collect()
    } else {
        rho.iter().zip(&start.radial).map(|(r, v)| r + dt * v).collect()
    };
    Ok(StepResult { shape: shape.with_rho(next)?, dt, start })
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// `max|F| ≤ stop_tol · max ρ`
    Stationary,
    MaxSteps,
    TimeLimit,
}

/// Output of [`run`].
#[derive(Debug, Clone)]
pub struct RunResult {
    pub series: MonitorSeries,
    pub final_shape: Shape,
    pub stop: StopReason,
}

impl RunResult {
    pub fn passed(&self) -> bool {
        self.series.verdicts.iter().all(|v| v.pass)
    }
}

/// Runs the flow, recording every monitor after each step.
///
/// The flows are immortal; the run is truncated at stationarity,
/// `max_steps`, or `t_max`, and the reason is reported.
pub fn run(shape: Shape, spec: &FlowSpec, monitors: &[MonitorRequest], g: &Weight) -> Result<RunResult> {
    spec.validate()?;
    spec.kind.check_compatible(shape.space(), shape.n())?;
    let names: Vec<String> = monitors.iter().map(|m| m.id.to_string()).collect();
    let mut series = MonitorSeries::new(monitors);
    let mut shape = shape;
    let mut t = 0.0;
    let mut vel = velocity(&shape, spec.kind)?;
    let record = |series: &mut MonitorSeries, shape: &Shape, geom: &Geometry, t: f64, max_f: f64| -> Result<()> {
        let values = monitors
            .iter()
            .map(|m| monitor_value(shape, geom, m.id, g))
            .collect::<Result<Vec<f64>>>()?;
        series.push(t, max_f, values);
        Ok(())
    };
    record(&mut series, &shape, &vel.geometry, t, vel.max_speed())?;
    let stop = loop {
        let scale = shape.rho().iter().copied().fold(0.0, f64::max);
        if vel.max_speed() <= spec.stop_tol * scale {
            break StopReason::Stationary;
        }
        if series.steps() >= spec.max_steps {
            break StopReason::MaxSteps;
        }
        let cap = match spec.t_max {
            Some(tm) if t >= tm * (1.0 - 1e-14) => break StopReason::TimeLimit,
            Some(tm) => spec.dt.min(tm - t),
            None => spec.dt,
        };
        let index = series.steps();
        let res = step_from(&shape, spec, vel, cap).map_err(|e| annotate(e, index))?;
        t += res.dt;
        shape = res.shape;
        vel = velocity(&shape, spec.kind).map_err(|e| annotate(e, index + 1))?;
        record(&mut series, &shape, &vel.geometry, t, vel.max_speed())?;
    };
    debug_assert_eq!(names.len(), series.series.len());
    series.finish(spec.drift_tol);
    Ok(RunResult { series, final_shape: shape, stop })
}

fn annotate(e: Error, step: usize) -> Error {
    match e {
        Error::Convexity(m) => Error::Convexity(format!("step {step}: {m}")),
        Error::NonFinite(m) => Error::NonFinite(format!("step {step}: {m}")),
        Error::Domain(m) => Error::Numerical(format!("step {step}: shape left the domain: {m}")),
        other => other,
    }
}

#[cfg(test)]
mod tests;
