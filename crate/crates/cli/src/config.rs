//! Run configuration: flags, JSON files and resolved defaults.

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use warpineq::axisym::{ShapeSpec, DEFAULT_M};
use warpineq::corpus::CorpusSpec;
use warpineq::curve2d::{CurveSpec, DEFAULT_N};
use warpineq::flowlab::{FlowKind, FlowSpec, Shape};
use warpineq::spectral::{DEFAULT_COUNT, DEFAULT_MAX_MODE};
use warpineq::{SpaceForm, Weight};

use crate::Usage;

/// Samples per curve / per profile for flow runs. Flows step explicitly
/// with `dt ∝ h²`, so they use a coarser grid than the verifiers.
pub const FLOW_SAMPLES: usize = 64;
/// Curve samples for the eigenvalue problem.
pub const EIGEN_CURVE_SAMPLES: usize = 1024;

/// A shape given either as a compact string (`ellipse:2:1`) or as a
/// tagged JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShapeArg {
    Text(String),
    Curve(CurveSpec),
    Axisym(ShapeSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ResolvedShape {
    Curve(CurveSpec),
    Axisym(ShapeSpec),
}

/// Everything a run depends on. Serialized (after defaults are filled in)
/// into every report, and hashed into the config digest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    /// `euclidean`, `hyperbolic`, `sphere`, or `m2`/`mn` together with `K`
    pub space: Option<String>,
    #[serde(rename = "K")]
    pub curvature: Option<i32>,
    pub dim: Option<usize>,
    pub shape: Option<ShapeArg>,
    pub weight: Option<String>,
    pub theorem: Option<String>,
    pub suite: Option<String>,
    pub flow: Option<String>,
    pub k: Option<usize>,
    pub l: Option<i32>,
    /// `N` for curves, `M` for profiles
    pub samples: Option<usize>,
    pub dt: Option<f64>,
    pub max_steps: Option<usize>,
    pub t_max: Option<f64>,
    pub stop_tol: Option<f64>,
    pub drift_tol: Option<f64>,
    pub max_mode: Option<usize>,
    pub eigen_count: Option<usize>,
    pub count: Option<usize>,
    pub amp: Option<f64>,
    pub seed: Option<u64>,
    pub modes: Option<usize>,
    pub radius: Option<f64>,
}

/// Flags shared by every subcommand; each overrides the `--config` file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory for CSV/JSON artifacts
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// euclidean | hyperbolic | sphere | m2 | mn (with --K)
    #[arg(long)]
    pub space: Option<String>,
    /// Curvature of the space form (-1, 0, 1)
    #[arg(long = "K", allow_negative_numbers = true)]
    pub curvature: Option<i32>,
    /// Ambient dimension n
    #[arg(long)]
    pub dim: Option<usize>,
    /// Shape, e.g. circle:2, ellipse:2:1, fourier:a0:c1:s1:..., sphere:1,
    /// offset_sphere:R:d, spheroid:a:b, legendre:a0:c1:...
    #[arg(long)]
    pub shape: Option<String>,
    /// Weight preset, e.g. monomial:2, exp, rational-minus:1
    #[arg(long)]
    pub weight: Option<String>,
    /// afw | minkowski2d | minkowski-h | minkowski-s | three-term | eigen-bound
    #[arg(long)]
    pub theorem: Option<String>,
    /// Verifier suite (example-1.4)
    #[arg(long)]
    pub suite: Option<String>,
    /// curve-lp | imcf-k | hyp-mean | sph-mean
    #[arg(long)]
    pub flow: Option<String>,
    /// Curvature order k (afw, imcf-k, three-term, eigen-bound)
    #[arg(long)]
    pub k: Option<usize>,
    /// Lower index l of the Alexandrov-Fenchel quotient, -1 <= l < k
    #[arg(long, allow_negative_numbers = true)]
    pub l: Option<i32>,
    /// Samples per curve (N) or per profile (M)
    #[arg(long)]
    pub samples: Option<usize>,
    /// Time step cap; the CFL limit may shrink it
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Stop the flow at this time
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Stationarity threshold on max|F| / max rho
    #[arg(long)]
    pub stop_tol: Option<f64>,
    /// Allowed per-step relative drift against a monotone claim
    #[arg(long)]
    pub drift_tol: Option<f64>,
    /// Highest Fourier mode of the axisymmetric eigenproblem
    #[arg(long)]
    pub max_mode: Option<usize>,
    /// Number of eigenvalues to report
    #[arg(long)]
    pub eigen_count: Option<usize>,
    /// Corpus size for sweeps
    #[arg(long)]
    pub count: Option<usize>,
    /// Corpus perturbation amplitude
    #[arg(long)]
    pub amp: Option<f64>,
    /// Corpus seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Highest corpus mode
    #[arg(long)]
    pub modes: Option<usize>,
    /// Corpus base radius
    #[arg(long)]
    pub radius: Option<f64>,
}

macro_rules! overlay {
    ($cfg:ident, $args:ident, $($field:ident),*) => {
        $(if $args.$field.is_some() { $cfg.$field = $args.$field.clone(); })*
    };
}

impl RunConfig {
    /// Reads `--config` (if any) and applies the flags on top.
    pub fn load(command: &str, args: &CommonArgs) -> anyhow::Result<RunConfig> {
        let mut cfg = match &args.config {
            Some(path) => read_config(path)?,
            None => RunConfig::default(),
        };
        cfg.command = command.to_string();
        overlay!(
            cfg, args, space, curvature, dim, weight, theorem, suite, flow, k, l, samples, dt, max_steps, t_max,
            stop_tol, drift_tol, max_mode, eigen_count, count, amp, seed, modes, radius
        );
        if let Some(s) = &args.shape {
            cfg.shape = Some(ShapeArg::Text(s.clone()));
        }
        Ok(cfg)
    }

    /// sha256 of the canonical JSON serialization.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn space_form(&self) -> anyhow::Result<SpaceForm> {
        let from_name = match self.space.as_deref() {
            None => None,
            Some("euclidean" | "flat" | "r") => Some(0),
            Some("hyperbolic" | "h") => Some(-1),
            Some("sphere" | "spherical" | "s") => Some(1),
            Some("m2" | "mn") => None,
            Some(other) => return Err(Usage::new(format!("unknown space `{other}`"))),
        };
        let k = match (from_name, self.curvature) {
            (Some(a), Some(b)) if a != b => {
                return Err(Usage::new(format!("--space {} conflicts with --K {b}", self.space.as_deref().unwrap_or(""))))
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) if self.space.is_some() => return Err(Usage::new("--space m2/mn needs --K")),
            (None, None) => 0,
        };
        Ok(SpaceForm::new(k)?)
    }

    /// Dimension: explicit, implied by `--space m2`, or by the shape kind.
    pub fn dimension(&self) -> anyhow::Result<usize> {
        let implied = match self.space.as_deref() {
            Some("m2") => Some(2),
            _ => None,
        };
        let n = match (self.dim, implied) {
            (Some(d), Some(i)) if d != i => return Err(Usage::new(format!("--space m2 conflicts with --dim {d}"))),
            (Some(d), _) => d,
            (None, Some(i)) => i,
            (None, None) => match self.resolved_shape()? {
                Some(ResolvedShape::Curve(_)) => 2,
                Some(ResolvedShape::Axisym(_)) => 3,
                None => match self.flow.as_deref() {
                    Some(f) if f.starts_with("curve-lp") => 2,
                    _ if self.theorem.as_deref() == Some("minkowski2d") || self.suite.is_some() => 2,
                    _ => 3,
                },
            },
        };
        if n < 2 {
            return Err(Usage::new(format!("dimension must be at least 2, got {n}")));
        }
        Ok(n)
    }

    pub fn resolved_shape(&self) -> anyhow::Result<Option<ResolvedShape>> {
        Ok(match &self.shape {
            None => None,
            Some(ShapeArg::Curve(c)) => Some(ResolvedShape::Curve(c.clone())),
            Some(ShapeArg::Axisym(s)) => Some(ResolvedShape::Axisym(s.clone())),
            Some(ShapeArg::Text(t)) if CurveSpec::is_curve_kind(t) => Some(ResolvedShape::Curve(CurveSpec::parse(t)?)),
            Some(ShapeArg::Text(t)) => Some(ResolvedShape::Axisym(ShapeSpec::parse(t)?)),
        })
    }

    pub fn weight(&self) -> anyhow::Result<Weight> {
        Ok(Weight::parse(self.weight.as_deref().unwrap_or("monomial:1"))?)
    }

    pub fn flow_kind(&self) -> anyhow::Result<Option<FlowKind>> {
        match &self.flow {
            None => Ok(None),
            Some(f) => Ok(Some(FlowKind::parse(f, self.k)?)),
        }
    }

    /// Samples for a shape of dimension `n`, given per-command defaults.
    pub fn samples_for(&self, n: usize, curve_default: usize, profile_default: usize) -> usize {
        self.samples.unwrap_or(if n == 2 { curve_default } else { profile_default })
    }

    /// Builds the configured shape.
    pub fn build_shape(&self, curve_default: usize, profile_default: usize) -> anyhow::Result<Shape> {
        let space = self.space_form()?;
        let n = self.dimension()?;
        let samples = self.samples_for(n, curve_default, profile_default);
        match self.resolved_shape()? {
            None => Err(Usage::new("no shape given (use --shape)")),
            Some(ResolvedShape::Curve(c)) if n == 2 => Ok(Shape::Curve(c.build(space, samples)?)),
            Some(ResolvedShape::Axisym(s)) if n >= 3 => Ok(Shape::Axisym(s.build(space, n, samples)?)),
            Some(ResolvedShape::Curve(_)) => Err(Usage::new(format!("curve shape given for dimension {n}"))),
            Some(ResolvedShape::Axisym(_)) => Err(Usage::new("hypersurface shape given for dimension 2")),
        }
    }

    pub fn flow_spec(&self, kind: FlowKind) -> anyhow::Result<FlowSpec> {
        let mut spec = FlowSpec::new(kind);
        if let Some(dt) = self.dt {
            spec.dt = dt;
        }
        if let Some(s) = self.max_steps {
            spec.max_steps = s;
        }
        spec.t_max = self.t_max;
        if let Some(t) = self.stop_tol {
            spec.stop_tol = t;
        }
        if let Some(t) = self.drift_tol {
            spec.drift_tol = t;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn corpus(&self) -> CorpusSpec {
        let mut c = CorpusSpec::new(self.count.unwrap_or(10), self.amp.unwrap_or(0.1), self.seed.unwrap_or(0));
        if let Some(m) = self.modes {
            c.modes = m;
        }
        c.radius = self.radius;
        c
    }

    /// Fills in the defaults a command actually uses, so that reports
    /// record them.
    pub fn resolve_defaults(&mut self) -> anyhow::Result<()> {
        let n = self.dimension()?;
        self.dim = Some(n);
        self.curvature = Some(self.space_form()?.curvature());
        self.weight.get_or_insert_with(|| "monomial:1".into());
        let (curve, profile) = match self.command.as_str() {
            "flow" => (FLOW_SAMPLES, FLOW_SAMPLES),
            "eigen" => (EIGEN_CURVE_SAMPLES, DEFAULT_M),
            "sweep" if self.flow.is_some() => (FLOW_SAMPLES, FLOW_SAMPLES),
            _ => (DEFAULT_N, DEFAULT_M),
        };
        self.samples = Some(self.samples_for(n, curve, profile));
        if self.command == "eigen" || self.theorem.as_deref() == Some("eigen-bound") {
            self.max_mode.get_or_insert(DEFAULT_MAX_MODE);
            self.eigen_count.get_or_insert(DEFAULT_COUNT);
        }
        if self.command == "sweep" {
            let c = self.corpus();
            self.count = Some(c.count);
            self.amp = Some(c.amp);
            self.seed = Some(c.seed);
            self.modes = Some(c.modes);
        }
        Ok(())
    }
}

fn read_config(path: &Path) -> anyhow::Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Usage::new(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(|e| Usage::new(format!("{e:#}")))
}
