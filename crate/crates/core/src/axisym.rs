//! Hypersurfaces of revolution in `M^n(K)`, `n ≥ 3`, written as radial
//! graphs `r = ρ(θ)` over the polar angle `θ ∈ [0, π]` of `S^{n-1}`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::quad;
use crate::spaceform::{radial_ag_integral, unit_sphere_area, SpaceForm, Weight};
use crate::symfun::binomial;

/// Default number of θ panels.
pub const DEFAULT_M: usize = 800;
/// Allowed one-sided pole slope relative to `max ρ`.
pub const POLE_TOL: f64 = 1e-6;

/// Profile samples `ρ_j = ρ(jπ/M)`, `j = 0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisymShape {
    space: SpaceForm,
    n: usize,
    rho: Vec<f64>,
}

/// Shape description used in config files and on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ShapeSpec {
    ProfileSamples { rho: Vec<f64> },
    Sphere { radius: f64 },
    /// Euclidean sphere of radius `radius` centred on the axis at distance `offset`.
    OffsetSphere { radius: f64, offset: f64 },
    /// `ρ = a0 + Σ coeffs[l-1] P_l(cos θ)`.
    Legendre { a0: f64, coeffs: Vec<f64> },
    /// Euclidean spheroid with polar semi-axis `a` and equatorial semi-axis `b`.
    Spheroid { a: f64, b: f64 },
}

/// Legendre polynomial `P_l(x)` by the three-term recurrence.
pub fn legendre(l: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if l == 0 {
        return p0;
    }
    for k in 1..l {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

impl ShapeSpec {
    /// Parses `sphere:R`, `offset_sphere:R:d`, `legendre:a0:c1:c2:…`, `spheroid:a:b`.
    pub fn parse(text: &str) -> Result<ShapeSpec> {
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
            "sphere" => {
                need(1)?;
                Ok(ShapeSpec::Sphere { radius: nums[0] })
            }
            "offset_sphere" => {
                need(2)?;
                Ok(ShapeSpec::OffsetSphere { radius: nums[0], offset: nums[1] })
            }
            "spheroid" => {
                need(2)?;
                Ok(ShapeSpec::Spheroid { a: nums[0], b: nums[1] })
            }
            "legendre" => {
                if nums.is_empty() {
                    return Err(Error::InvalidArgument("legendre needs at least a0".into()));
                }
                Ok(ShapeSpec::Legendre { a0: nums[0], coeffs: nums[1..].to_vec() })
            }
            other => Err(Error::InvalidArgument(format!("unknown axisymmetric shape `{other}`"))),
        }
    }

    fn radius_at(&self, theta: f64) -> f64 {
        match self {
            ShapeSpec::ProfileSamples { .. } => unreachable!("samples are not evaluated pointwise"),
            ShapeSpec::Sphere { radius } => *radius,
            ShapeSpec::OffsetSphere { radius, offset } => {
                offset * theta.cos() + (radius * radius - (offset * theta.sin()).powi(2)).sqrt()
            }
            ShapeSpec::Legendre { a0, coeffs } => {
                let x = theta.cos();
                a0 + coeffs.iter().enumerate().map(|(l, c)| c * legendre(l + 1, x)).sum::<f64>()
            }
            ShapeSpec::Spheroid { a, b } => {
                1.0 / ((theta.cos() / a).powi(2) + (theta.sin() / b).powi(2)).sqrt()
            }
        }
    }

    pub fn build(&self, space: SpaceForm, n: usize, m: usize) -> Result<AxisymShape> {
        match self {
            ShapeSpec::ProfileSamples { rho } => AxisymShape::new(space, n, rho.clone()),
            ShapeSpec::OffsetSphere { radius, offset } if !(offset.abs() < *radius) => {
                Err(Error::InvalidArgument("offset sphere must enclose the origin".into()))
            }
            _ => AxisymShape::from_fn(space, n, m, |t| self.radius_at(t)),
        }
    }
}

impl AxisymShape {
    /// Validates raw samples, including pole regularity.
    pub fn new(space: SpaceForm, n: usize, rho: Vec<f64>) -> Result<Self> {
        let shape = AxisymShape::from_regular(space, n, rho)?;
        let max = shape.rho.iter().copied().fold(0.0, f64::max);
        let (s0, s1) = shape.pole_slopes();
        if s0.abs().max(s1.abs()) > POLE_TOL * max {
            return Err(Error::Domain(format!(
                "profile is not regular at the poles (one-sided slopes {s0:e}, {s1:e})"
            )));
        }
        Ok(shape)
    }

    /// Samples of a profile that is even about both poles by construction
    /// (analytic specs, flow updates). The one-sided slope test is skipped
    /// because its truncation error dominates on coarse grids.
    pub(crate) fn from_regular(space: SpaceForm, n: usize, rho: Vec<f64>) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!("axisymmetric shapes need n >= 3, got {n}")));
        }
        let m = rho.len().saturating_sub(1);
        if m < 8 || m % 2 != 0 {
            return Err(Error::InvalidArgument(format!("profile needs an even panel count >= 8, got {m}")));
        }
        for (j, &r) in rho.iter().enumerate() {
            if !r.is_finite() {
                return Err(Error::NonFinite(format!("ρ at sample {j}")));
            }
            if r <= 0.0 {
                return Err(Error::Domain(format!("ρ[{j}] = {r} is not positive")));
            }
            if r >= space.convex_r_max() {
                return Err(Error::Domain(format!("ρ[{j}] = {r} leaves the open hemisphere")));
            }
        }
        Ok(AxisymShape { space, n, rho })
    }

    /// Samples an even profile `f` on `M` panels.
    pub fn from_fn<F: Fn(f64) -> f64>(space: SpaceForm, n: usize, m: usize, f: F) -> Result<Self> {
        let h = PI / m as f64;
        AxisymShape::from_regular(space, n, (0..=m).map(|j| f(j as f64 * h)).collect())
    }

    /// Geodesic sphere of radius `r` centred at the origin.
    pub fn sphere(space: SpaceForm, n: usize, r: f64, m: usize) -> Result<Self> {
        AxisymShape::from_regular(space, n, vec![r; m + 1])
    }

    pub fn space(&self) -> SpaceForm {
        self.space
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of θ panels.
    pub fn m(&self) -> usize {
        self.rho.len() - 1
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn step(&self) -> f64 {
        PI / self.m() as f64
    }

    pub fn roundness(&self) -> f64 {
        let (lo, hi) = self
            .rho
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)));
        hi - lo
    }

    /// Fourth-order one-sided `ρ'` at `θ = 0` and `θ = π`.
    pub fn pole_slopes(&self) -> (f64, f64) {
        let r = &self.rho;
        let m = self.m();
        let h = self.step();
        let d0 = (-25.0 * r[0] + 48.0 * r[1] - 36.0 * r[2] + 16.0 * r[3] - 3.0 * r[4]) / (12.0 * h);
        let d1 = (25.0 * r[m] - 48.0 * r[m - 1] + 36.0 * r[m - 2] - 16.0 * r[m - 3] + 3.0 * r[m - 4]) / (12.0 * h);
        (d0, d1)
    }

    /// Re-expresses a Euclidean shape radially about the point at signed
    /// distance `shift` along the axis.
    pub fn shifted(&self, shift: f64) -> Result<AxisymShape> {
        if self.space != SpaceForm::EUCLIDEAN {
            return Err(Error::InvalidArgument("translation is only defined in R^n".into()));
        }
        let m = self.m();
        let h = self.step();
        let out = (0..=m)
            .map(|j| {
                let alpha = j as f64 * h;
                let mut theta = alpha;
                let mut radius = f64::NAN;
                for _ in 0..60 {
                    let (r, dr) = self.interpolate(theta);
                    let (s, c) = theta.sin_cos();
                    let q = [r * c - shift, r * s];
                    let dp = [dr * c - r * s, dr * s + r * c];
                    let q2 = q[0] * q[0] + q[1] * q[1];
                    let diff = q[1].atan2(q[0]) - alpha;
                    let dang = (q[0] * dp[1] - q[1] * dp[0]) / q2;
                    radius = q2.sqrt();
                    if diff.abs() < 1e-14 {
                        break;
                    }
                    if !(dang > 0.0) {
                        return Err(Error::Domain("shape is not star-shaped about the new centre".into()));
                    }
                    theta = (theta - diff / dang).clamp(0.0, PI);
                }
                Ok(radius)
            })
            .collect::<Result<Vec<f64>>>()?;
        AxisymShape::from_regular(self.space, self.n, out)
    }

    /// Local cubic Lagrange interpolation of `ρ` and `ρ'` on the evenly
    /// reflected grid.
    fn interpolate(&self, theta: f64) -> (f64, f64) {
        let h = self.step();
        let m = self.m() as i64;
        let x = theta / h;
        let i = (x.floor() as i64).clamp(0, m - 1);
        let t = x - i as f64;
        let at = |j: i64| -> f64 {
            let j = if j < 0 {
                -j
            } else if j > m {
                2 * m - j
            } else {
                j
            };
            self.rho[j as usize]
        };
        let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
        // nodes at -1, 0, 1, 2
        let l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        let d0 = -(3.0 * t * t - 6.0 * t + 2.0) / 6.0;
        let d1 = (3.0 * t * t - 4.0 * t - 1.0) / 2.0;
        let d2 = -(3.0 * t * t - 2.0 * t - 2.0) / 2.0;
        let d3 = (3.0 * t * t - 1.0) / 6.0;
        (
            p0 * l0 + p1 * l1 + p2 * l2 + p3 * l3,
            (p0 * d0 + p1 * d1 + p2 * d2 + p3 * d3) / h,
        )
    }
}

/// Fourth-order `ρ'` and `ρ''` with even reflection across both poles.
pub(crate) fn profile_derivatives(rho: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let m = rho.len() as i64 - 1;
    let at = |j: i64| -> f64 {
        let j = if j < 0 {
            -j
        } else if j > m {
            2 * m - j
        } else {
            j
        };
        rho[j as usize]
    };
    let mut d1 = Vec::with_capacity(rho.len());
    let mut d2 = Vec::with_capacity(rho.len());
    for j in 0..=m {
        let (a, b, c, d, e) = (at(j - 2), at(j - 1), at(j), at(j + 1), at(j + 2));
        d1.push((a - 8.0 * b + 8.0 * d - e) / (12.0 * h));
        d2.push((-a + 16.0 * b - 30.0 * c + 16.0 * d - e) / (12.0 * h * h));
    }
    // exact zeros at the poles for the even extension
    d1[0] = 0.0;
    d1[m as usize] = 0.0;
    (d1, d2)
}

/// Per-sample geometry of an [`AxisymShape`].
#[derive(Debug, Clone)]
pub struct AxisymGeometry {
    pub space: SpaceForm,
    pub n: usize,
    pub theta: Vec<f64>,
    pub rho: Vec<f64>,
    pub drho: Vec<f64>,
    pub ddrho: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    /// `W = √(φ² + ρ'²)`
    pub speed: Vec<f64>,
    /// meridian curvature
    pub kappa1: Vec<f64>,
    /// parallel curvature, multiplicity `n - 2`
    pub kappa2: Vec<f64>,
    pub u: Vec<f64>,
    pub potential: Vec<f64>,
    pub grad_phi_sq: Vec<f64>,
    /// area-element weights including the Simpson factors
    pub dmu: Vec<f64>,
    pub area: f64,
    pub volume: f64,
}

/// `σ_k` of `(κ₁, κ₂, …, κ₂)` with `m - 1` copies of `κ₂`.
pub fn sigma_axisym(k: usize, k1: f64, k2: f64, m: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > m {
        return 0.0;
    }
    binomial(m - 1, k) * k2.powi(k as i32) + k1 * binomial(m - 1, k - 1) * k2.powi(k as i32 - 1)
}

impl AxisymGeometry {
    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// Number of principal curvatures, `n - 1`.
    pub fn m(&self) -> usize {
        self.n - 1
    }

    pub fn sigma(&self, k: usize, j: usize) -> f64 {
        sigma_axisym(k, self.kappa1[j], self.kappa2[j], self.m())
    }

    /// `σ_k` of the tuple with `κ₁` removed.
    pub fn sigma_without_first(&self, k: usize, j: usize) -> f64 {
        let rest = self.m() - 1;
        if k > rest {
            0.0
        } else {
            binomial(rest, k) * self.kappa2[j].powi(k as i32)
        }
    }

    pub fn h_norm(&self, k: usize, j: usize) -> f64 {
        self.sigma(k, j) / binomial(self.m(), k)
    }

    pub fn mean_curvature(&self, j: usize) -> f64 {
        self.sigma(1, j)
    }

    pub fn integrate<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        (0..self.len()).map(|j| f(j) * self.dmu[j]).sum()
    }

    pub fn convexity(&self) -> ConvexityClass {
        convexity_class(self)
    }

    pub fn require_k_convex(&self, k: usize) -> Result<()> {
        let margin = self.convexity().k_convex_margin(k);
        if margin > 0.0 {
            Ok(())
        } else {
            Err(Error::Convexity(format!("shape leaves the Garding cone Γ_{k} (margin {margin:e})")))
        }
    }

    /// CSV with columns `theta,rho,kappa1,kappa2,u,Phi,dmu`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,rho,kappa1,kappa2,u,Phi,dmu\n");
        for j in 0..self.len() {
            let _ = writeln!(
                s,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.theta[j], self.rho[j], self.kappa1[j], self.kappa2[j], self.u[j], self.potential[j], self.dmu[j]
            );
        }
        s
    }
}

/// Principal curvatures, support function, area element and enclosed volume.
pub fn axisym_geometry(s: &AxisymShape) -> Result<AxisymGeometry> {
    let space = s.space;
    let n = s.n;
    let m = s.m();
    let h = s.step();
    let (drho, ddrho) = profile_derivatives(&s.rho, h);
    let weights = quad::simpson_weights(m, h);
    let omega = unit_sphere_area(n - 2);
    let e = n as i32 - 2;
    let len = m + 1;
    let mut g = AxisymGeometry {
        space,
        n,
        theta: (0..len).map(|j| j as f64 * h).collect(),
        rho: s.rho.clone(),
        drho,
        ddrho,
        phi: Vec::with_capacity(len),
        dphi: Vec::with_capacity(len),
        speed: Vec::with_capacity(len),
        kappa1: Vec::with_capacity(len),
        kappa2: Vec::with_capacity(len),
        u: Vec::with_capacity(len),
        potential: Vec::with_capacity(len),
        grad_phi_sq: Vec::with_capacity(len),
        dmu: Vec::with_capacity(len),
        area: 0.0,
        volume: 0.0,
    };
    for j in 0..len {
        let r = s.rho[j];
        let (d1, d2) = (g.drho[j], g.ddrho[j]);
        if !(d1.is_finite() && d2.is_finite()) {
            return Err(Error::NonFinite(format!("derivative of ρ at sample {j}")));
        }
        let theta = g.theta[j];
        let phi = space.phi(r);
        let dphi = space.dphi(r);
        let w2 = phi * phi + d1 * d1;
        let w = w2.sqrt();
        let k1 = (phi * phi * dphi + 2.0 * dphi * d1 * d1 - phi * d2) / (w2 * w);
        let k2 = if j == 0 || j == m {
            k1
        } else {
            let (sn, cs) = theta.sin_cos();
            (phi * dphi * sn - d1 * cs) / (phi * w * sn)
        };
        let sin_pow = if j == 0 || j == m { 0.0 } else { theta.sin().powi(e) };
        g.phi.push(phi);
        g.dphi.push(dphi);
        g.speed.push(w);
        g.kappa1.push(k1);
        g.kappa2.push(k2);
        g.u.push(phi * phi / w);
        g.potential.push(space.potential(r));
        g.grad_phi_sq.push(phi * phi * d1 * d1 / w2);
        g.dmu.push(omega * w * phi.powi(e) * sin_pow * weights[j]);
    }
    g.area = g.dmu.iter().sum();
    let inner = par::try_map_range(len, |j| {
        if j == 0 || j == m {
            return Ok(0.0);
        }
        let e1 = n as i32 - 1;
        let v = match space.curvature() {
            0 => s.rho[j].powi(n as i32) / n as f64,
            _ => quad::integrate_default(|t| space.phi(t).powi(e1), 0.0, s.rho[j])?,
        };
        Ok::<f64, Error>(v * g.theta[j].sin().powi(e) * weights[j])
    })?;
    g.volume = omega * inner.iter().sum::<f64>();
    Ok(g)
}

/// `W_l`: `|Ω|` for `l = -1`, `|Σ|` for `l = 0`, `∫ σ_l dμ` otherwise.
pub fn quermassintegral(geom: &AxisymGeometry, l: i32) -> Result<f64> {
    let m = geom.m() as i32;
    match l {
        -1 => Ok(geom.volume),
        0 => Ok(geom.area),
        l if (1..=m).contains(&l) => Ok(geom.integrate(|j| geom.sigma(l as usize, j))),
        _ => Err(Error::InvalidArgument(format!("quermassintegral index {l} outside [-1, {m}]"))),
    }
}

/// `∫_Σ g(Φ) σ_k dμ`.
pub fn weighted_sigma_integral(geom: &AxisymGeometry, g: &Weight, k: usize) -> Result<f64> {
    if k < 1 || k > geom.m() {
        return Err(Error::InvalidArgument(format!("k = {k} outside [1, {}]", geom.m())));
    }
    g.check_values(&geom.potential)?;
    Ok(geom.integrate(|j| g.g(geom.potential[j]) * geom.sigma(k, j)))
}

/// `A_g(Ω)`: adaptive quadrature along each ray, Simpson in θ.
pub fn ag_volume(s: &AxisymShape, g: &Weight) -> Result<f64> {
    let space = s.space;
    let pots: Vec<f64> = s.rho.iter().map(|&r| space.potential(r)).collect();
    g.check_values(&pots)?;
    let m = s.m();
    let h = s.step();
    let weights = quad::simpson_weights(m, h);
    let e = s.n as i32 - 2;
    let rays = par::try_map_range(m + 1, |j| {
        if j == 0 || j == m {
            return Ok(0.0);
        }
        let theta = j as f64 * h;
        Ok::<f64, Error>(radial_ag_integral(space, s.n, g, s.rho[j])? * theta.sin().powi(e) * weights[j])
    })?;
    Ok(unit_sphere_area(s.n - 2) * rays.iter().sum::<f64>())
}

/// `∫_Ω φ' dv = ω_{n-2} ∫ φ(ρ)ⁿ/n · sin^{n-2}θ dθ`.
pub fn phi_prime_volume(s: &AxisymShape) -> f64 {
    let m = s.m();
    let h = s.step();
    let weights = quad::simpson_weights(m, h);
    let e = s.n as i32 - 2;
    let sum: f64 = (1..m)
        .map(|j| s.space.phi(s.rho[j]).powi(s.n as i32) / s.n as f64 * (j as f64 * h).sin().powi(e) * weights[j])
        .sum();
    unit_sphere_area(s.n - 2) * sum
}

/// Cone margins aggregated over all samples (minimum over θ).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityClass {
    /// `min_θ min_{j ≤ k} σ_j` for `k = 1..=n-1`.
    pub k_convex_margins: Vec<f64>,
    /// `min κ_i`
    pub min_curvature: f64,
}

impl ConvexityClass {
    /// Margin for `Γ_k^+`; positive iff `k`-convex at every sample.
    pub fn k_convex_margin(&self, k: usize) -> f64 {
        self.k_convex_margins[k - 1]
    }

    pub fn k_convex(&self, k: usize) -> bool {
        self.k_convex_margin(k) > 0.0
    }

    pub fn strictly_convex(&self) -> bool {
        self.min_curvature > 0.0
    }

    /// All `κ_i ≥ 1`.
    pub fn h_convex(&self) -> bool {
        self.h_convex_margin() >= 0.0
    }

    pub fn h_convex_margin(&self) -> f64 {
        self.min_curvature - 1.0
    }
}

pub fn convexity_class(geom: &AxisymGeometry) -> ConvexityClass {
    let m = geom.m();
    let mut margins = vec![f64::INFINITY; m];
    let mut min_curvature = f64::INFINITY;
    for j in 0..geom.len() {
        let mut running = f64::INFINITY;
        for (k, slot) in margins.iter_mut().enumerate() {
            running = running.min(geom.sigma(k + 1, j));
            *slot = slot.min(running);
        }
        min_curvature = min_curvature.min(geom.kappa1[j]).min(geom.kappa2[j]);
    }
    ConvexityClass { k_convex_margins: margins, min_curvature }
}
