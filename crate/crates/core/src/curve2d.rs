//! Closed curves in `M²(K)` given as radial graphs `r = ρ(θ)` about the
//! origin, sampled at `θ_j = 2πj/N`, with spectrally accurate geometry.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier;
use crate::par;
use crate::spaceform::{radial_ag_integral, SpaceForm, Weight};

/// Default sample count for curves.
pub const DEFAULT_N: usize = 512;
/// Convexity margin `min κ · L` below which analytic shapes are resampled finer.
pub const REFINE_MARGIN: f64 = 1e-3;
const MAX_N: usize = 8192;

/// A closed curve `r = ρ(θ)` enclosing the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    space: SpaceForm,
    rho: Vec<f64>,
}

/// Curve description used in config files and on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CurveSpec {
    /// `ρ = a0 + Σ cos[k-1]·cos kθ + sin[k-1]·sin kθ`
    RadialFourier {
        a0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    Samples { rho: Vec<f64> },
    Circle { radius: f64 },
    /// Euclidean ellipse `x²/a² + y²/b² = 1` in radial form.
    Ellipse { a: f64, b: f64 },
    /// Euclidean circle of radius `radius` centred at `(offset, 0)`.
    OffsetCircle { radius: f64, offset: f64 },
}

impl CurveSpec {
    /// Parses `circle:R`, `ellipse:a:b`, `offset_circle:R:d`,
    /// `fourier:a0:c1:s1:c2:s2:…`.
    pub fn parse(text: &str) -> Result<CurveSpec> {
        let mut parts = text.trim().split(':');
        let kind = parts.next().unwrap_or_default();
        let nums = parts
            .map(|p| p.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad number `{p}` in `{text}`"))))
            .collect::<Result<Vec<f64>>>()?;
        let need = |k: usize| -> Result<()> {
            if nums.len() == k {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("`{kind}` takes {k} numbers, got {}", nums.len())))
            }
        };
        match kind {
            "circle" => {
                need(1)?;
                Ok(CurveSpec::Circle { radius: nums[0] })
            }
            "ellipse" => {
                need(2)?;
                Ok(CurveSpec::Ellipse { a: nums[0], b: nums[1] })
            }
            "offset_circle" => {
                need(2)?;
                Ok(CurveSpec::OffsetCircle { radius: nums[0], offset: nums[1] })
            }
            "fourier" => {
                if nums.is_empty() {
                    return Err(Error::InvalidArgument("fourier needs at least a0".into()));
                }
                let rest = &nums[1..];
                let cos = rest.iter().step_by(2).copied().collect();
                let sin = rest.iter().skip(1).step_by(2).copied().collect();
                Ok(CurveSpec::RadialFourier { a0: nums[0], cos, sin })
            }
            other => Err(Error::InvalidArgument(format!("unknown curve shape `{other}`"))),
        }
    }

    /// Whether the spec describes a curve (as opposed to a hypersurface).
    pub fn is_curve_kind(text: &str) -> bool {
        matches!(
            text.split(':').next().unwrap_or_default(),
            "circle" | "ellipse" | "offset_circle" | "fourier"
        )
    }

    fn radius_at(&self, theta: f64) -> f64 {
        match self {
            CurveSpec::RadialFourier { a0, cos, sin } => {
                let mut r = *a0;
                for (k, c) in cos.iter().enumerate() {
                    r += c * ((k + 1) as f64 * theta).cos();
                }
                for (k, s) in sin.iter().enumerate() {
                    r += s * ((k + 1) as f64 * theta).sin();
                }
                r
            }
            CurveSpec::Samples { .. } => unreachable!("samples are not evaluated pointwise"),
            CurveSpec::Circle { radius } => *radius,
            CurveSpec::Ellipse { a, b } => {
                1.0 / ((theta.cos() / a).powi(2) + (theta.sin() / b).powi(2)).sqrt()
            }
            CurveSpec::OffsetCircle { radius, offset } => {
                offset * theta.cos() + (radius * radius - (offset * theta.sin()).powi(2)).sqrt()
            }
        }
    }

    /// Samples the curve; analytic shapes are refined until the convexity
    /// margin `min κ · L` reaches [`REFINE_MARGIN`] or `N` hits its cap.
    pub fn build(&self, space: SpaceForm, n: usize) -> Result<ClosedCurve> {
        if let CurveSpec::Samples { rho } = self {
            return ClosedCurve::new(space, rho.clone());
        }
        if let CurveSpec::OffsetCircle { radius, offset } = self {
            if !(offset.abs() < *radius) {
                return Err(Error::InvalidArgument("offset circle must enclose the origin".into()));
            }
        }
        let mut n = n;
        loop {
            let c = ClosedCurve::from_fn(space, n, |t| self.radius_at(t))?;
            let geom = curve_geometry(&c)?;
            if geom.min_kappa() * geom.length >= REFINE_MARGIN || n >= MAX_N {
                return Ok(c);
            }
            n *= 2;
        }
    }
}

impl ClosedCurve {
    pub fn new(space: SpaceForm, rho: Vec<f64>) -> Result<Self> {
        if rho.len() < 8 {
            return Err(Error::InvalidArgument(format!("curve needs at least 8 samples, got {}", rho.len())));
        }
        for (j, &r) in rho.iter().enumerate() {
            if !r.is_finite() {
                return Err(Error::NonFinite(format!("ρ at sample {j}")));
            }
            if r <= 0.0 {
                return Err(Error::Domain(format!("ρ[{j}] = {r} is not positive")));
            }
            if r >= space.convex_r_max() {
                return Err(Error::Domain(format!(
                    "ρ[{j}] = {r} leaves the open hemisphere"
                )));
            }
        }
        Ok(ClosedCurve { space, rho })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(space: SpaceForm, n: usize, f: F) -> Result<Self> {
        ClosedCurve::new(space, fourier::grid(n).into_iter().map(f).collect())
    }

    /// Geodesic circle of radius `r` centred at the origin.
    pub fn circle(space: SpaceForm, r: f64, n: usize) -> Result<Self> {
        ClosedCurve::new(space, vec![r; n])
    }

    pub fn space(&self) -> SpaceForm {
        self.space
    }

    pub fn n(&self) -> usize {
        self.rho.len()
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n() as f64
    }

    /// `max ρ - min ρ`.
    pub fn roundness(&self) -> f64 {
        let (lo, hi) = self
            .rho
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)));
        hi - lo
    }

    /// Re-expresses a Euclidean curve radially about `center`.
    ///
    /// The weighted functionals depend on the origin, so callers must do
    /// this explicitly.
    pub fn translated(&self, center: [f64; 2]) -> Result<ClosedCurve> {
        if self.space != SpaceForm::EUCLIDEAN {
            return Err(Error::InvalidArgument("translation is only defined in R^2".into()));
        }
        let n = self.n();
        let interp = fourier::Interpolant::new(&self.rho);
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            let alpha = self.theta(j);
            let mut theta = alpha;
            let mut radius = f64::NAN;
            for _ in 0..60 {
                let (r, dr) = interp.eval_with_derivative(theta);
                let (s, c) = theta.sin_cos();
                let q = [r * c - center[0], r * s - center[1]];
                let dp = [dr * c - r * s, dr * s + r * c];
                let q2 = q[0] * q[0] + q[1] * q[1];
                let ang = q[1].atan2(q[0]);
                let mut diff = ang - alpha;
                diff -= (2.0 * PI) * (diff / (2.0 * PI)).round();
                let dang = (q[0] * dp[1] - q[1] * dp[0]) / q2;
                radius = q2.sqrt();
                if diff.abs() < 1e-14 {
                    break;
                }
                if !(dang > 0.0) {
                    return Err(Error::Domain("curve is not star-shaped about the new centre".into()));
                }
                theta -= diff / dang;
            }
            out.push(radius);
        }
        ClosedCurve::new(self.space, out)
    }
}

/// Per-sample geometry of a [`ClosedCurve`].
#[derive(Debug, Clone)]
pub struct CurveGeometry {
    pub space: SpaceForm,
    pub theta: Vec<f64>,
    pub rho: Vec<f64>,
    pub drho: Vec<f64>,
    pub ddrho: Vec<f64>,
    /// φ(ρ)
    pub phi: Vec<f64>,
    /// φ'(ρ)
    pub dphi: Vec<f64>,
    /// `W = √(φ² + ρ'²)`, so `ds = W dθ`
    pub speed: Vec<f64>,
    pub kappa: Vec<f64>,
    /// support function `u = φ²/W`
    pub u: Vec<f64>,
    /// Φ(ρ)
    pub potential: Vec<f64>,
    /// arclength weights `W_j · 2π/N`
    pub ds: Vec<f64>,
    /// `|∇Φ|² = φ² - u² = φ²ρ'²/W²`
    pub grad_phi_sq: Vec<f64>,
    pub length: f64,
    pub area: f64,
}

impl CurveGeometry {
    pub fn n(&self) -> usize {
        self.rho.len()
    }

    pub fn min_kappa(&self) -> f64 {
        self.kappa.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_strictly_convex(&self) -> bool {
        self.min_kappa() > 0.0
    }

    pub fn require_strictly_convex(&self) -> Result<()> {
        let k = self.min_kappa();
        if k > 0.0 {
            Ok(())
        } else {
            Err(Error::Convexity(format!("curve is not strictly convex (min κ = {k:e})")))
        }
    }

    /// Trapezoid (spectrally accurate) integral `Σ f_j ds_j`.
    pub fn integrate<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        (0..self.n()).map(|j| f(j) * self.ds[j]).sum()
    }

    /// CSV with columns `theta,rho,kappa,u,Phi,ds`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,rho,kappa,u,Phi,ds\n");
        for j in 0..self.n() {
            let _ = writeln!(
                s,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.theta[j], self.rho[j], self.kappa[j], self.u[j], self.potential[j], self.ds[j]
            );
        }
        s
    }
}

/// Curvature, support function, arclength and area of a radial curve.
pub fn curve_geometry(c: &ClosedCurve) -> Result<CurveGeometry> {
    let space = c.space;
    let n = c.n();
    let dtheta = 2.0 * PI / n as f64;
    let (drho, ddrho) = fourier::derivatives(&c.rho);
    let mut g = CurveGeometry {
        space,
        theta: fourier::grid(n),
        rho: c.rho.clone(),
        drho,
        ddrho,
        phi: Vec::with_capacity(n),
        dphi: Vec::with_capacity(n),
        speed: Vec::with_capacity(n),
        kappa: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
        potential: Vec::with_capacity(n),
        ds: Vec::with_capacity(n),
        grad_phi_sq: Vec::with_capacity(n),
        length: 0.0,
        area: 0.0,
    };
    for j in 0..n {
        let r = c.rho[j];
        let (d1, d2) = (g.drho[j], g.ddrho[j]);
        if !(d1.is_finite() && d2.is_finite()) {
            return Err(Error::NonFinite(format!("derivative of ρ at sample {j}")));
        }
        let phi = space.phi(r);
        let dphi = space.dphi(r);
        let w2 = phi * phi + d1 * d1;
        let w = w2.sqrt();
        let kappa = (phi * phi * dphi + 2.0 * dphi * d1 * d1 - phi * d2) / (w2 * w);
        g.phi.push(phi);
        g.dphi.push(dphi);
        g.speed.push(w);
        g.kappa.push(kappa);
        g.u.push(phi * phi / w);
        g.potential.push(space.potential(r));
        g.ds.push(w * dtheta);
        g.grad_phi_sq.push(phi * phi * d1 * d1 / w2);
    }
    g.length = g.ds.iter().sum();
    g.area = g.potential.iter().sum::<f64>() * dtheta;
    Ok(g)
}

/// `∫_γ g(Φ) κ ds`.
pub fn weighted_kappa_integral(geom: &CurveGeometry, g: &Weight) -> Result<f64> {
    g.check_values(&geom.potential)?;
    Ok(geom.integrate(|j| g.g(geom.potential[j]) * geom.kappa[j]))
}

/// Weighted area `A_g(Ω) = ∫_Ω (g'(Φ)φ' + K g(Φ)) dv`: adaptive quadrature
/// along each ray, periodic trapezoid in θ.
pub fn ag_area(c: &ClosedCurve, g: &Weight) -> Result<f64> {
    let space = c.space;
    let pots: Vec<f64> = c.rho.iter().map(|&r| space.potential(r)).collect();
    g.check_values(&pots)?;
    let rays = par::try_map_range(c.n(), |j| radial_ag_integral(space, 2, g, c.rho[j]))?;
    Ok(rays.iter().sum::<f64>() * 2.0 * PI / c.n() as f64)
}

/// Right-hand side of the weighted Minkowski inequality for curves of
/// length `l`: `2g(x)√(4π² - K l²) - 2πg(0) + 4πK G(x)`, `x = A(l)/2π`.
pub fn minkowski2d_rhs(space: SpaceForm, g: &Weight, l: f64) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::Domain(format!("length must be positive, got {l}")));
    }
    let disc = 4.0 * PI * PI - space.k() * l * l;
    if disc < 0.0 {
        return Err(Error::Domain(format!("4π² - K L² < 0 for L = {l}")));
    }
    let x = space.disc_area_from_length(l)? / (2.0 * PI);
    g.check_value(x)?;
    Ok(2.0 * g.g(x) * disc.sqrt() - 2.0 * PI * g.g(0.0) + 4.0 * PI * space.k() * g.antiderivative(x))
}

/// `∫_γ (2g'(Φ)uκ - g''(Φ)|∇Φ|²) F ds` for a normal speed `F` on the grid.
pub fn evolution_rhs_2d(geom: &CurveGeometry, g: &Weight, speed: &[f64]) -> Result<f64> {
    if speed.len() != geom.n() {
        return Err(Error::GridMismatch { expected: geom.n(), got: speed.len() });
    }
    g.check_values(&geom.potential)?;
    Ok(geom.integrate(|j| {
        let p = geom.potential[j];
        (2.0 * g.dg(p) * geom.u[j] * geom.kappa[j] - g.ddg(p) * geom.grad_phi_sq[j]) * speed[j]
    }))
}

/// `∫_γ g(Φ) κ ds + A_g(Ω)`.
pub fn weighted_functional_2d(c: &ClosedCurve, geom: &CurveGeometry, g: &Weight) -> Result<f64> {
    Ok(weighted_kappa_integral(geom, g)? + ag_area(c, g)?)
}
