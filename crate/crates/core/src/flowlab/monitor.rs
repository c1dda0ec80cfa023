use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::shape::{Geometry, Shape};
use crate::axisym::{ag_volume, phi_prime_volume, quermassintegral, sigma_axisym, weighted_sigma_integral};
use crate::curve2d::{ag_area, weighted_kappa_integral};
use crate::error::{Error, Result};
use crate::spaceform::Weight;

/// Per-step relative drift allowed before a monotonicity claim fails.
pub const DRIFT_TOL: f64 = 1e-7;

/// Functionals that can be monitored along a flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum MonitorId {
    /// curve length
    Length,
    /// enclosed area for curves, `|Σ|` for hypersurfaces
    Area,
    /// enclosed volume `|Ω|`
    Volume,
    /// `W_l`, `l ≥ -1`
    Quermass(i32),
    /// `∫ g(Φ) κ ds + A_g(Ω)`
    Weighted2d,
    /// `∫ g(Φ) σ_k dμ`
    WeightedRn(usize),
    /// `∫ g(Φ) H dμ + (n-1) A_g(Ω)`
    WeightedH,
    /// `∫_Ω φ' dv`
    SphPhiVol,
    /// `L² - 4πA + K A²` for curves
    IsoDefect,
}

impl fmt::Display for MonitorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonitorId::Length => f.write_str("length"),
            MonitorId::Area => f.write_str("area"),
            MonitorId::Volume => f.write_str("volume"),
            MonitorId::Quermass(l) => write!(f, "W_{l}"),
            MonitorId::Weighted2d => f.write_str("weighted2d"),
            MonitorId::WeightedRn(k) => write!(f, "weightedRn:{k}"),
            MonitorId::WeightedH => f.write_str("weightedH"),
            MonitorId::SphPhiVol => f.write_str("sphPhiVol"),
            MonitorId::IsoDefect => f.write_str("isoDefect"),
        }
    }
}

impl FromStr for MonitorId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown monitor `{s}`"));
        Ok(match s {
            "length" => MonitorId::Length,
            "area" => MonitorId::Area,
            "volume" => MonitorId::Volume,
            "weighted2d" => MonitorId::Weighted2d,
            "weightedRn" => MonitorId::WeightedRn(1),
            "weightedH" => MonitorId::WeightedH,
            "sphPhiVol" => MonitorId::SphPhiVol,
            "isoDefect" => MonitorId::IsoDefect,
            _ => {
                if let Some(l) = s.strip_prefix("W_") {
                    MonitorId::Quermass(l.parse().map_err(|_| bad())?)
                } else if let Some(k) = s.strip_prefix("weightedRn:") {
                    MonitorId::WeightedRn(k.parse().map_err(|_| bad())?)
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

impl From<MonitorId> for String {
    fn from(m: MonitorId) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for MonitorId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Direction claimed for a monitored functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Claim {
    Nonincreasing,
    Nondecreasing,
    Constant,
    /// recorded only
    None,
}

impl FromStr for Claim {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonincreasing" => Ok(Claim::Nonincreasing),
            "nondecreasing" => Ok(Claim::Nondecreasing),
            "constant" => Ok(Claim::Constant),
            "none" => Ok(Claim::None),
            _ => Err(Error::InvalidArgument(format!("unknown claim `{s}`"))),
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Claim::Nonincreasing => "nonincreasing",
            Claim::Nondecreasing => "nondecreasing",
            Claim::Constant => "constant",
            Claim::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonitorRequest {
    pub id: MonitorId,
    pub claim: Claim,
}

impl MonitorRequest {
    pub fn new(id: MonitorId, claim: Claim) -> Self {
        MonitorRequest { id, claim }
    }

    /// Parses `id` or `id@claim`; a bare id carries no claim.
    pub fn parse(text: &str) -> Result<Self> {
        match text.split_once('@') {
            Some((id, claim)) => Ok(MonitorRequest::new(id.parse()?, claim.parse()?)),
            None => Ok(MonitorRequest::new(text.parse()?, Claim::None)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub monitor: MonitorId,
    pub claim: Claim,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub monitor: String,
    pub claim: Claim,
    /// largest adverse per-step change relative to the monitor value
    pub max_violation: f64,
    /// `(last - first) / |first|`
    pub total_drift: f64,
    pub pass: bool,
}

/// Time series of monitored functionals with verdicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorSeries {
    pub times: Vec<f64>,
    pub max_speed: Vec<f64>,
    pub series: Vec<Series>,
    pub verdicts: Vec<Verdict>,
    pub drift_tol: f64,
}

impl MonitorSeries {
    pub fn new(requests: &[MonitorRequest]) -> Self {
        MonitorSeries {
            times: Vec::new(),
            max_speed: Vec::new(),
            series: requests
                .iter()
                .map(|r| Series { monitor: r.id, claim: r.claim, values: Vec::new() })
                .collect(),
            verdicts: Vec::new(),
            drift_tol: DRIFT_TOL,
        }
    }

    /// Number of completed steps.
    pub fn steps(&self) -> usize {
        self.times.len().saturating_sub(1)
    }

    pub fn push(&mut self, t: f64, max_speed: f64, values: Vec<f64>) {
        self.times.push(t);
        self.max_speed.push(max_speed);
        for (s, v) in self.series.iter_mut().zip(values) {
            s.values.push(v);
        }
    }

    pub fn get(&self, id: MonitorId) -> Option<&[f64]> {
        self.series.iter().find(|s| s.monitor == id).map(|s| s.values.as_slice())
    }

    pub fn verdict(&self, id: MonitorId) -> Option<&Verdict> {
        let name = id.to_string();
        self.verdicts.iter().find(|v| v.monitor == name)
    }

    /// Computes verdicts with the given per-step tolerance.
    pub fn finish(&mut self, drift_tol: f64) {
        self.drift_tol = drift_tol;
        self.verdicts = self
            .series
            .iter()
            .map(|s| {
                let mut worst = 0.0f64;
                for w in s.values.windows(2) {
                    let scale = w[0].abs().max(w[1].abs()).max(f64::MIN_POSITIVE);
                    let d = (w[1] - w[0]) / scale;
                    let adverse = match s.claim {
                        Claim::Nonincreasing => d,
                        Claim::Nondecreasing => -d,
                        Claim::Constant => d.abs(),
                        Claim::None => 0.0,
                    };
                    worst = worst.max(adverse);
                }
                let total_drift = match (s.values.first(), s.values.last()) {
                    (Some(a), Some(b)) if *a != 0.0 => (b - a) / a.abs(),
                    _ => 0.0,
                };
                Verdict {
                    monitor: s.monitor.to_string(),
                    claim: s.claim,
                    max_violation: worst,
                    total_drift,
                    pass: worst <= drift_tol,
                }
            })
            .collect();
    }

    /// CSV with columns `step,t,maxF,<monitors…>`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,t,maxF");
        for s in &self.series {
            let _ = write!(out, ",{}", s.monitor);
        }
        out.push('\n');
        for i in 0..self.times.len() {
            let _ = write!(out, "{i},{:.17e},{:.17e}", self.times[i], self.max_speed[i]);
            for s in &self.series {
                let _ = write!(out, ",{:.17e}", s.values[i]);
            }
            out.push('\n');
        }
        out
    }
}

impl Geometry {
    fn weight(&self, j: usize) -> f64 {
        match self {
            Geometry::Curve(g) => g.ds[j],
            Geometry::Axisym(g) => g.dmu[j],
        }
    }

    fn sigma(&self, k: usize, j: usize) -> f64 {
        match self {
            Geometry::Curve(g) => sigma_axisym(k, g.kappa[j], g.kappa[j], 1),
            Geometry::Axisym(g) => g.sigma(k, j),
        }
    }

    fn sigma_without_first(&self, k: usize, j: usize) -> f64 {
        match self {
            Geometry::Curve(_) => {
                if k == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            Geometry::Axisym(g) => g.sigma_without_first(k, j),
        }
    }

    fn field(&self, j: usize) -> (f64, f64, f64, f64) {
        match self {
            Geometry::Curve(g) => (g.potential[j], g.u[j], g.dphi[j], g.grad_phi_sq[j]),
            Geometry::Axisym(g) => (g.potential[j], g.u[j], g.dphi[j], g.grad_phi_sq[j]),
        }
    }

    fn potentials(&self) -> &[f64] {
        match self {
            Geometry::Curve(g) => &g.potential,
            Geometry::Axisym(g) => &g.potential,
        }
    }

    fn k(&self) -> f64 {
        match self {
            Geometry::Curve(g) => g.space.k(),
            Geometry::Axisym(g) => g.space.k(),
        }
    }

    fn integrate<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        (0..self.len()).map(|j| f(j) * self.weight(j)).sum()
    }
}

fn mismatch(id: MonitorId, shape: &Shape) -> Error {
    Error::InvalidArgument(format!("monitor {id} is not defined for n = {}", shape.n()))
}

/// Value of a monitored functional on `shape` (with its geometry).
pub fn monitor_value(shape: &Shape, geom: &Geometry, id: MonitorId, g: &Weight) -> Result<f64> {
    match (shape, geom) {
        (Shape::Curve(c), Geometry::Curve(cg)) => match id {
            MonitorId::Length | MonitorId::Quermass(0) => Ok(cg.length),
            MonitorId::Area | MonitorId::Volume | MonitorId::Quermass(-1) => Ok(cg.area),
            MonitorId::Quermass(1) => Ok(cg.integrate(|j| cg.kappa[j])),
            MonitorId::Weighted2d | MonitorId::WeightedH => {
                Ok(weighted_kappa_integral(cg, g)? + ag_area(c, g)?)
            }
            MonitorId::WeightedRn(1) => weighted_kappa_integral(cg, g),
            MonitorId::SphPhiVol => {
                let dtheta = 2.0 * std::f64::consts::PI / c.n() as f64;
                Ok(cg.phi.iter().map(|p| p * p / 2.0).sum::<f64>() * dtheta)
            }
            MonitorId::IsoDefect => {
                let (l, a) = (cg.length, cg.area);
                Ok(l * l - 4.0 * std::f64::consts::PI * a + cg.space.k() * a * a)
            }
            _ => Err(mismatch(id, shape)),
        },
        (Shape::Axisym(s), Geometry::Axisym(ag)) => match id {
            MonitorId::Area => Ok(ag.area),
            MonitorId::Volume => Ok(ag.volume),
            MonitorId::Quermass(l) => quermassintegral(ag, l),
            MonitorId::WeightedRn(k) => weighted_sigma_integral(ag, g, k),
            MonitorId::WeightedH => {
                Ok(weighted_sigma_integral(ag, g, 1)? + (s.n() as f64 - 1.0) * ag_volume(s, g)?)
            }
            MonitorId::SphPhiVol => Ok(phi_prime_volume(s)),
            _ => Err(mismatch(id, shape)),
        },
        _ => Err(Error::InvalidArgument("geometry does not belong to the shape".into())),
    }
}

/// Analytic time derivative of a monitor under normal speed `f`.
pub fn monitor_rhs(shape: &Shape, geom: &Geometry, id: MonitorId, g: &Weight, f: &[f64]) -> Result<f64> {
    if f.len() != geom.len() {
        return Err(Error::GridMismatch { expected: geom.len(), got: f.len() });
    }
    let n = geom.n();
    let curve = n == 2;
    let kk = geom.k();
    let quermass = |l: i32| -> Result<f64> {
        match l {
            -1 => Ok(geom.integrate(|j| f[j])),
            0 => Ok(geom.integrate(|j| geom.sigma(1, j) * f[j])),
            l if l >= 1 && (l as usize) < n => {
                let l = l as usize;
                Ok(geom.integrate(|j| {
                    ((l + 1) as f64 * geom.sigma(l + 1, j) - (n - l) as f64 * kk * geom.sigma(l - 1, j)) * f[j]
                }))
            }
            _ => Err(mismatch(id, shape)),
        }
    };
    let weighted_sigma = |k: usize| -> Result<f64> {
        g.check_values(geom.potentials())?;
        let (nf, kf) = (n as f64, k as f64);
        Ok(geom.integrate(|j| {
            let (p, u, dphi, grad2) = geom.field(j);
            let sk = geom.sigma(k, j);
            let skm = geom.sigma(k - 1, j);
            let div = (nf - kf) * dphi * skm - kf * u * sk;
            (g.dg(p) * u * sk - g.dg(p) * div - g.ddg(p) * geom.sigma_without_first(k - 1, j) * grad2
                + (kf + 1.0) * g.g(p) * geom.sigma(k + 1, j)
                - (nf - kf) * kk * g.g(p) * skm)
                * f[j]
        }))
    };
    let weighted_h = || -> Result<f64> {
        g.check_values(geom.potentials())?;
        Ok(geom.integrate(|j| {
            let (p, u, _, grad2) = geom.field(j);
            (2.0 * g.dg(p) * u * geom.sigma(1, j) + 2.0 * g.g(p) * geom.sigma(2, j) - g.ddg(p) * grad2) * f[j]
        }))
    };
    match id {
        MonitorId::Length if curve => quermass(0),
        MonitorId::Area if curve => quermass(-1),
        MonitorId::Area => quermass(0),
        MonitorId::Volume => quermass(-1),
        MonitorId::Quermass(l) => quermass(l),
        MonitorId::Weighted2d if curve => weighted_h(),
        MonitorId::WeightedH => weighted_h(),
        MonitorId::WeightedRn(k) if k >= 1 && k < n => weighted_sigma(k),
        MonitorId::SphPhiVol => Ok(geom.integrate(|j| geom.field(j).2 * f[j])),
        _ => Err(mismatch(id, shape)),
    }
}

/// `∫ ((n-1)φ'/H - u) dμ`, nonnegative for mean-convex shapes.
pub fn heintze_karcher_gap(geom: &Geometry) -> Result<f64> {
    let n = geom.n() as f64;
    let mut min_h = f64::INFINITY;
    for j in 0..geom.len() {
        min_h = min_h.min(geom.sigma(1, j));
    }
    if !(min_h > 0.0) {
        return Err(Error::Convexity(format!("mean curvature is not positive (min H = {min_h:e})")));
    }
    Ok(geom.integrate(|j| {
        let (_, u, dphi, _) = geom.field(j);
        (n - 1.0) * dphi / geom.sigma(1, j) - u
    }))
}
