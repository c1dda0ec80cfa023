//! Left- and right-hand sides of the weighted inequalities, their margins
//! and verdicts.

mod example14;

pub use example14::{example_1_4_items, example_1_4_suite, sample_lengths, Example14Item};

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::axisym::{ag_volume, axisym_geometry, phi_prime_volume, quermassintegral, weighted_sigma_integral, AxisymGeometry, AxisymShape};
use crate::curve2d::{ag_area, curve_geometry, minkowski2d_rhs, weighted_kappa_integral, ClosedCurve, CurveGeometry};
use crate::error::{Error, Result};
use crate::flowlab::FlowKind;
use crate::shape::{Geometry, Shape};
use crate::spaceform::{ball_ag, sphere_weighted_h, unit_sphere_area, SpaceForm, Weight};
use crate::symfun::{binomial, binomial_ext};

/// Relative equality tolerance for curves (spectral discretization).
pub const TOL_CURVE: f64 = 1e-6;
/// Relative equality tolerance for hypersurfaces of revolution.
pub const TOL_AXISYM: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InequalityVerdict {
    Holds,
    Equality,
    Violated,
    /// Both sides agree identically for this input (constant weight on curves).
    EqualityByStructure,
}

impl fmt::Display for InequalityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InequalityVerdict::Holds => "holds",
            InequalityVerdict::Equality => "equality",
            InequalityVerdict::Violated => "violated",
            InequalityVerdict::EqualityByStructure => "equality-by-structure",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `|margin| ≤ equality · scale` counts as equality.
    pub equality: f64,
}

/// One evaluated inequality instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem: String,
    pub params: serde_json::Value,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`
    pub margin: f64,
    /// `max(|lhs|, |rhs|)`
    pub scale: f64,
    pub verdict: InequalityVerdict,
    pub tolerances: Tolerances,
    pub shape_digest: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl InequalityReport {
    pub fn new(theorem: &str, params: serde_json::Value, lhs: f64, rhs: f64, tol: f64, shape_digest: String) -> Self {
        let margin = lhs - rhs;
        let scale = lhs.abs().max(rhs.abs());
        let verdict = if margin.abs() <= tol * scale {
            InequalityVerdict::Equality
        } else if margin > 0.0 {
            InequalityVerdict::Holds
        } else {
            InequalityVerdict::Violated
        };
        InequalityReport {
            theorem: theorem.to_string(),
            params,
            lhs,
            rhs,
            margin,
            scale,
            verdict,
            tolerances: Tolerances { equality: tol },
            shape_digest,
            notes: Vec::new(),
        }
    }

    /// Relative margin `margin / scale`.
    pub fn relative_margin(&self) -> f64 {
        if self.scale > 0.0 {
            self.margin / self.scale
        } else {
            0.0
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict != InequalityVerdict::Violated
    }

    fn with_notes(mut self, notes: impl IntoIterator<Item = String>) -> Self {
        self.notes.extend(notes);
        self
    }
}

/// SHA-256 over the space form, dimension and the raw sample bits.
pub fn shape_digest(shape: &Shape) -> String {
    let mut h = Sha256::new();
    h.update(shape.space().curvature().to_le_bytes());
    h.update((shape.n() as u64).to_le_bytes());
    for r in shape.rho() {
        h.update(r.to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// Solves `f(r) = y` for a strictly monotone `f` on `[a, b]`: bisection to
/// `1e-12 (b - a)` followed by one secant step inside the final bracket.
pub fn invert_monotone<F: Fn(f64) -> f64>(f: F, y: f64, bracket: (f64, f64)) -> Result<f64> {
    let (a, b) = bracket;
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::InvalidArgument(format!("bad bracket [{a}, {b}]")));
    }
    const PROBES: usize = 32;
    let samples: Vec<f64> = (0..=PROBES).map(|i| f(a + (b - a) * i as f64 / PROBES as f64)).collect();
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("monotone map on the bracket".into()));
    }
    let up = samples[PROBES] > samples[0];
    let monotone = samples.windows(2).all(|w| if up { w[1] > w[0] } else { w[1] < w[0] });
    if !monotone {
        return Err(Error::NotMonotone(format!("map is not strictly monotone on [{a}, {b}]")));
    }
    let (fa, fb) = (samples[0], samples[PROBES]);
    let (lo_v, hi_v) = if up { (fa, fb) } else { (fb, fa) };
    let slack = 1e-14 * lo_v.abs().max(hi_v.abs());
    if y < lo_v - slack || y > hi_v + slack {
        return Err(Error::Domain(format!("value {y} outside the range [{lo_v}, {hi_v}]")));
    }
    let sign = if up { 1.0 } else { -1.0 };
    let (mut lo, mut hi) = (a, b);
    let (mut flo, mut fhi) = (fa, fb);
    let width = 1e-12 * (b - a);
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if sign * (fm - y) < 0.0 {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    let r = if fhi != flo { lo + (y - flo) * (hi - lo) / (fhi - flo) } else { 0.5 * (lo + hi) };
    Ok(r.clamp(lo, hi))
}

/// [`invert_monotone`] for an increasing `f` on `[a, ∞)`: the upper end is
/// doubled until it brackets `y`.
pub fn invert_increasing(f: impl Fn(f64) -> f64, y: f64, a: f64, mut b: f64) -> Result<f64> {
    for _ in 0..200 {
        if f(b) >= y {
            return invert_monotone(&f, y, (a, b));
        }
        b *= 2.0;
    }
    Err(Error::Domain(format!("value {y} is not attained")))
}

fn params_base(shape: &Shape) -> serde_json::Map<String, serde_json::Value> {
    let mut m = serde_json::Map::new();
    m.insert("K".into(), json!(shape.space().curvature()));
    m.insert("n".into(), json!(shape.n()));
    m.insert("samples".into(), json!(shape.rho().len()));
    m
}

fn with(mut m: serde_json::Map<String, serde_json::Value>, extra: serde_json::Value) -> serde_json::Value {
    if let serde_json::Value::Object(e) = extra {
        m.extend(e);
    }
    serde_json::Value::Object(m)
}

fn tolerance(shape: &Shape) -> f64 {
    match shape {
        Shape::Curve(_) => TOL_CURVE,
        Shape::Axisym(_) => TOL_AXISYM,
    }
}

fn require_space(shape: &Shape, k: i32, what: &str) -> Result<()> {
    if shape.space().curvature() != k {
        return Err(Error::InvalidArgument(format!(
            "{what} applies to K = {k}, got K = {}",
            shape.space().curvature()
        )));
    }
    Ok(())
}

fn require_k_convex(geom: &Geometry, k: usize) -> Result<()> {
    match geom {
        Geometry::Curve(g) => g.require_strictly_convex(),
        Geometry::Axisym(g) => g.require_k_convex(k),
    }
}

/// `∫ H_j Φ^a dμ` on either kind of shape, with `H_{-1} := u`.
fn h_integral(geom: &Geometry, j: i32, with_potential: bool) -> f64 {
    let phi = |p: f64| if with_potential { p } else { 1.0 };
    match geom {
        Geometry::Curve(g) => g.integrate(|i| {
            let h = match j {
                -1 => g.u[i],
                0 => 1.0,
                _ => g.kappa[i],
            };
            h * phi(g.potential[i])
        }),
        Geometry::Axisym(g) => g.integrate(|i| {
            let h = if j == -1 { g.u[i] } else { g.h_norm(j as usize, i) };
            h * phi(g.potential[i])
        }),
    }
}

/// Euclidean weighted Alexandrov–Fenchel inequality
/// `∫ g(Φ) σ_k dμ ≥ χ(ξ⁻¹(W_l))`, `-1 ≤ l ≤ k - 1 ≤ n - 2`.
pub fn verify_afw(shape: &Shape, g: &Weight, k: usize, l: i32) -> Result<InequalityReport> {
    require_space(shape, 0, "afw")?;
    let n = shape.n();
    if k < 1 || k > n - 1 || l < -1 || l > k as i32 - 1 {
        return Err(Error::InvalidArgument(format!("afw needs -1 <= l <= k-1 <= n-2, got k = {k}, l = {l}, n = {n}")));
    }
    let geom = shape.geometry()?;
    require_k_convex(&geom, k)?;
    let (lhs, wl) = match &geom {
        Geometry::Curve(c) => (weighted_kappa_integral(c, g)?, if l == -1 { c.area } else { c.length }),
        Geometry::Axisym(a) => (weighted_sigma_integral(a, g, k)?, quermassintegral(a, l)?),
    };
    let (rhs, r) = afw_rhs(n, g, k, l, wl)?;
    let params = with(params_base(shape), json!({"k": k, "l": l, "weight": g.id(), "W_l": wl, "radius": r}));
    Ok(InequalityReport::new("afw", params, lhs, rhs, tolerance(shape), shape_digest(shape))
        .with_notes(g.notes().iter().cloned()))
}

/// `χ(ξ⁻¹(W_l))` for the Euclidean inequality; also returns the radius.
fn afw_rhs(n: usize, g: &Weight, k: usize, l: i32, wl: f64) -> Result<(f64, f64)> {
    let omega = unit_sphere_area(n - 1);
    let cl = binomial_ext(n - 1, l);
    let e = (n as i32 - 1 - l) as f64;
    let xi = |r: f64| cl * omega * r.powf(e);
    let r = invert_increasing(xi, wl, 0.0, 1.0)?;
    g.check_value(r * r / 2.0)?;
    Ok((binomial(n - 1, k) * omega * g.g(r * r / 2.0) * r.powi(n as i32 - k as i32 - 1), r))
}

/// Weighted Minkowski inequality for convex curves in `M²(K)`:
/// `∫ g(Φ) κ ds + A_g(Ω) ≥ 2g(x)√(4π² - KL²) - 2πg(0) + 4πK G(x)`.
pub fn verify_minkowski2d(curve: &ClosedCurve, g: &Weight) -> Result<InequalityReport> {
    let geom = curve_geometry(curve)?;
    verify_minkowski2d_with(curve, &geom, g)
}

pub(crate) fn verify_minkowski2d_with(curve: &ClosedCurve, geom: &CurveGeometry, g: &Weight) -> Result<InequalityReport> {
    geom.require_strictly_convex()?;
    let lhs = weighted_kappa_integral(geom, g)? + ag_area(curve, g)?;
    let rhs = minkowski2d_rhs(curve.space(), g, geom.length)?;
    let shape = Shape::Curve(curve.clone());
    let params = with(params_base(&shape), json!({"weight": g.id(), "length": geom.length}));
    let mut report = InequalityReport::new("minkowski2d", params, lhs, rhs, TOL_CURVE, shape_digest(&shape))
        .with_notes(g.notes().iter().cloned());
    if g.is_constant() {
        // ∫κ + K|Ω| = 2π, so both sides equal 2πc for every curve
        if report.verdict == InequalityVerdict::Equality {
            report.verdict = InequalityVerdict::EqualityByStructure;
        }
        report.notes.push("constant weight: both sides equal 2πc by Gauss–Bonnet".into());
    }
    Ok(report)
}

fn weighted_mean_lhs(shape: &AxisymShape, geom: &AxisymGeometry, g: &Weight) -> Result<f64> {
    let n = shape.n() as f64;
    Ok(weighted_sigma_integral(geom, g, 1)? + (n - 1.0) * ag_volume(shape, g)?)
}

fn chi_mean(space: SpaceForm, n: usize, g: &Weight, r: f64) -> Result<f64> {
    Ok(sphere_weighted_h(space, n, g, r)? + (n as f64 - 1.0) * ball_ag(space, n, g, r)?)
}

/// Radius of the geodesic sphere with area `area`.
fn area_radius(space: SpaceForm, n: usize, area: f64) -> Result<f64> {
    let omega = unit_sphere_area(n - 1);
    invert_increasing(|r| omega * space.phi(r).powi(n as i32 - 1), area, 0.0, 1.0)
}

/// Radius of the geodesic ball in the hemisphere with `∫ φ' dv = vol`.
fn phi_prime_radius(space: SpaceForm, n: usize, vol: f64) -> Result<f64> {
    let r = invert_monotone(|r| space.ball_phi_prime_volume(n, r), vol, (0.0, 0.5 * PI))?;
    space.check_convex_radius(r, "minkowski-s")?;
    Ok(r)
}

/// Hyperbolic weighted Minkowski inequality for h-convex hypersurfaces:
/// `∫ g(Φ) H dμ + (n-1) A_g(Ω) ≥ χ(ξ⁻¹(|Σ|))`, `ξ(r) = ω_{n-1} φ^{n-1}(r)`.
pub fn verify_minkowski_h(shape: &AxisymShape, g: &Weight) -> Result<InequalityReport> {
    let space = shape.space();
    if space.curvature() != -1 {
        return Err(Error::InvalidArgument("minkowski-h applies to K = -1".into()));
    }
    let n = shape.n();
    let geom = axisym_geometry(shape)?;
    let margin = geom.convexity().h_convex_margin();
    if margin < -1e-9 {
        return Err(Error::Convexity(format!("shape is not h-convex (min κ - 1 = {margin:e})")));
    }
    let lhs = weighted_mean_lhs(shape, &geom, g)?;
    let r = area_radius(space, n, geom.area)?;
    let rhs = chi_mean(space, n, g, r)?;
    let s = Shape::Axisym(shape.clone());
    let params = with(params_base(&s), json!({"weight": g.id(), "area": geom.area, "radius": r}));
    let mut report = InequalityReport::new("minkowski-h", params, lhs, rhs, TOL_AXISYM, shape_digest(&s))
        .with_notes(g.notes().iter().cloned());
    if g.is_constant() {
        report.notes.push("constant weight: reduces to the unweighted Minkowski inequality for W_1".into());
    }
    Ok(report)
}

/// Spherical weighted Minkowski inequality for convex hypersurfaces in the
/// open hemisphere: `∫ g(Φ) H dμ + (n-1) A_g(Ω) ≥ χ(ζ⁻¹(∫_Ω φ' dv))`,
/// `ζ(r) = ω_{n-1} φⁿ(r)/n`.
pub fn verify_minkowski_s(shape: &AxisymShape, g: &Weight) -> Result<InequalityReport> {
    let space = shape.space();
    if space.curvature() != 1 {
        return Err(Error::InvalidArgument("minkowski-s applies to K = 1".into()));
    }
    let n = shape.n();
    let geom = axisym_geometry(shape)?;
    let c = geom.convexity();
    if !c.strictly_convex() {
        return Err(Error::Convexity(format!("shape is not strictly convex (min κ = {:e})", c.min_curvature)));
    }
    let lhs = weighted_mean_lhs(shape, &geom, g)?;
    let vol = phi_prime_volume(shape);
    let r = phi_prime_radius(space, n, vol)?;
    let rhs = chi_mean(space, n, g, r)?;
    let s = Shape::Axisym(shape.clone());
    let params = with(params_base(&s), json!({"weight": g.id(), "phi_prime_volume": vol, "radius": r}));
    let mut report = InequalityReport::new("minkowski-s", params, lhs, rhs, TOL_AXISYM, shape_digest(&s))
        .with_notes(g.notes().iter().cloned());
    if g.is_constant() {
        report.notes.push("constant weight: reduces to the unweighted comparison".into());
    }
    Ok(report)
}

/// Pieces of the three-term inequality
/// `∫ H_k Φ dμ + k/(n-k+1) ∫ H_{k-2} dμ ≥ c_{n,k} ω_{n-1}^{-1/(n-k)} (∫ H_{k-1} dμ)^{(n+1-k)/(n-k)}`
/// with `H_{-1} := u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeTerm {
    /// `∫ H_k Φ dμ`
    pub weighted: f64,
    /// `∫ H_{k-2} dμ`
    pub lower: f64,
    /// `∫ H_{k-1} dμ`
    pub middle: f64,
    pub lhs: f64,
    pub rhs: f64,
}

pub fn three_term(geom: &Geometry, k: usize) -> Result<ThreeTerm> {
    let n = geom.n();
    if k < 1 || k > n - 1 {
        return Err(Error::InvalidArgument(format!("three-term needs 1 <= k <= n-1, got k = {k}, n = {n}")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let weighted = h_integral(geom, k as i32, true);
    let lower = h_integral(geom, k as i32 - 2, false);
    let middle = h_integral(geom, k as i32 - 1, false);
    let lhs = weighted + kf / (nf - kf + 1.0) * lower;
    let c = (nf + 1.0 + kf) / (2.0 * (nf + 1.0 - kf));
    let rhs = c * unit_sphere_area(n - 1).powf(-1.0 / (nf - kf)) * middle.powf((nf + 1.0 - kf) / (nf - kf));
    Ok(ThreeTerm { weighted, lower, middle, lhs, rhs })
}

/// Three-term Euclidean inequality (the `H_{-1} := u` convention applies at
/// `k = 1`).
pub fn verify_3term(shape: &Shape, k: usize) -> Result<InequalityReport> {
    require_space(shape, 0, "three-term")?;
    let geom = shape.geometry()?;
    require_k_convex(&geom, k)?;
    let t = three_term(&geom, k)?;
    let params = with(params_base(shape), json!({"k": k}));
    let mut report = InequalityReport::new("three-term", params, t.lhs, t.rhs, tolerance(shape), shape_digest(shape));
    if k == 1 {
        report.notes.push("H_{-1} is taken to be the support function u".into());
    }
    Ok(report)
}

/// End-to-end check of a flow run: the flow's monotone functional on the
/// terminal shape against the right-hand side built from the quantity the
/// flow preserves on the initial shape (length, `W_{k-1}`, area). For
/// `sph-mean`, whose `∫ φ' dv` only increases, the terminal value is used.
pub fn flow_limit(kind: FlowKind, initial: &Shape, terminal: &Shape, g: &Weight) -> Result<InequalityReport> {
    if initial.space() != terminal.space() || initial.n() != terminal.n() {
        return Err(Error::InvalidArgument("initial and terminal shapes live in different spaces".into()));
    }
    kind.check_compatible(initial.space(), initial.n())?;
    let space = initial.space();
    let n = initial.n();
    let (start, end) = (initial.geometry()?, terminal.geometry()?);
    let (lhs, rhs, quantity, tol) = match (kind, terminal, &start, &end) {
        (FlowKind::CurveLp, Shape::Curve(c), Geometry::Curve(a), Geometry::Curve(b)) => {
            let lhs = weighted_kappa_integral(b, g)? + ag_area(c, g)?;
            (lhs, minkowski2d_rhs(space, g, a.length)?, json!({"length": a.length}), TOL_CURVE)
        }
        (FlowKind::ImcfK { k }, _, Geometry::Axisym(a), Geometry::Axisym(b)) => {
            let l = k as i32 - 1;
            let wl = quermassintegral(a, l)?;
            let (rhs, _) = afw_rhs(n, g, k, l, wl)?;
            (weighted_sigma_integral(b, g, k)?, rhs, json!({"k": k, "l": l, "W_l": wl}), TOL_AXISYM)
        }
        (FlowKind::HypMean, Shape::Axisym(s), Geometry::Axisym(a), Geometry::Axisym(b)) => {
            let rhs = chi_mean(space, n, g, area_radius(space, n, a.area)?)?;
            (weighted_mean_lhs(s, b, g)?, rhs, json!({"area": a.area}), TOL_AXISYM)
        }
        (FlowKind::SphMean, Shape::Axisym(s), Geometry::Axisym(_), Geometry::Axisym(b)) => {
            let vol = phi_prime_volume(s);
            let rhs = chi_mean(space, n, g, phi_prime_radius(space, n, vol)?)?;
            (weighted_mean_lhs(s, b, g)?, rhs, json!({"phi_prime_volume": vol}), TOL_AXISYM)
        }
        _ => return Err(Error::InvalidArgument(format!("flow {kind} does not apply to this shape"))),
    };
    let mut params = params_base(terminal);
    params.insert("flow".into(), json!(kind.id()));
    params.insert("weight".into(), json!(g.id()));
    params.insert("initial_digest".into(), json!(shape_digest(initial)));
    let params = with(params, quantity);
    Ok(InequalityReport::new("flow-limit", params, lhs, rhs, tol, shape_digest(terminal))
        .with_notes(g.notes().iter().cloned()))
}

#[cfg(test)]
mod tests;
