//! The weighted eigenproblem `-Δf = λ H_k f` on closed curves and on
//! hypersurfaces of revolution, and the upper bound for its first nonzero
//! eigenvalue.

mod tridiag;

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::axisym::{AxisymGeometry, AxisymShape};
use crate::curve2d::{ClosedCurve, CurveGeometry};
use crate::error::{Error, Result};
use crate::fourier;
use crate::inequalities::{shape_digest, three_term, InequalityReport, ThreeTerm, TOL_AXISYM};
use crate::par;
use crate::shape::{Geometry, Shape};
use tridiag::SymTridiag;

/// Default number of Fourier modes `m = 0..=DEFAULT_MAX_MODE` for
/// hypersurfaces of revolution.
pub const DEFAULT_MAX_MODE: usize = 3;
/// Default number of eigenvalues kept.
pub const DEFAULT_COUNT: usize = 6;

/// One eigenvalue with its mode label and residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub index: usize,
    /// Fourier index `±m` around the axis, or the nodal count for curves
    pub mode: i32,
    pub lambda: f64,
    /// `‖H⁻¹(-Δf) - λf‖ / ‖f‖` in the `H dμ` norm
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub entries: Vec<SpectrumEntry>,
    /// number of grid unknowns per solve
    pub size: usize,
}

impl SpectrumResult {
    pub fn lambdas(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.lambda).collect()
    }

    /// First nonzero eigenvalue.
    pub fn lambda1(&self) -> Result<f64> {
        self.entries
            .get(1)
            .map(|e| e.lambda)
            .ok_or_else(|| Error::Numerical("spectrum has fewer than two eigenvalues".into()))
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().fold(0.0, |a, e| a.max(e.residual))
    }

    /// CSV `index,mode,lambda,residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,mode,lambda,residual\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{:.17e},{:.6e}", e.index, e.mode, e.lambda, e.residual);
        }
        out
    }
}

/// A discrete generalized problem `A f = λ B f`, `B` diagonal positive.
pub(crate) struct Pencil {
    sym: SymTridiag,
    /// `B^{1/2}`
    sqrt_b: Vec<f64>,
}

impl Pencil {
    pub(crate) fn new(diag: Vec<f64>, off: Vec<f64>, corner: f64, mass: &[f64]) -> Result<Self> {
        if let Some(j) = mass.iter().position(|b| !(*b > 0.0 && b.is_finite())) {
            return Err(Error::Convexity(format!("weight H_k is not positive at node {j}")));
        }
        let s: Vec<f64> = mass.iter().map(|b| b.sqrt()).collect();
        let n = s.len();
        let diag = (0..n).map(|j| diag[j] / (s[j] * s[j])).collect();
        let off = (0..n - 1).map(|j| off[j] / (s[j] * s[j + 1])).collect();
        let corner = if corner != 0.0 { corner / (s[0] * s[n - 1]) } else { 0.0 };
        Ok(Pencil { sym: SymTridiag::new(diag, off, corner), sqrt_b: s })
    }

    /// Smallest `count` eigenpairs: `(λ, f, residual)` with `f = B^{-1/2} x`.
    pub(crate) fn lowest(&self, count: usize) -> Vec<(f64, Vec<f64>, f64)> {
        self.sym
            .lowest(count)
            .into_iter()
            .map(|(lambda, x, residual)| {
                let f = x.iter().zip(&self.sqrt_b).map(|(a, s)| a / s).collect();
                (lambda, f, residual)
            })
            .collect()
    }
}

fn sign_changes_cyclic(f: &[f64]) -> usize {
    let scale = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let signs: Vec<bool> = f.iter().filter(|v| v.abs() > 1e-9 * scale).map(|v| *v > 0.0).collect();
    if signs.is_empty() {
        return 0;
    }
    (0..signs.len()).filter(|&j| signs[j] != signs[(j + 1) % signs.len()]).count()
}

/// Resamples a closed curve at `N` points equally spaced in arclength;
/// returns `(h, κ_j)`.
fn arclength_resample(geom: &CurveGeometry) -> Result<(f64, Vec<f64>)> {
    let n = geom.n();
    let (mean, periodic) = fourier::antiderivative(&geom.speed);
    let length = 2.0 * PI * mean;
    let p = fourier::Interpolant::new(&periodic);
    let k = fourier::Interpolant::new(&geom.kappa);
    let p0 = periodic[0];
    let h = length / n as f64;
    let kappa = par::try_map_range(n, |j| {
        let target = j as f64 * h;
        let mut theta = 2.0 * PI * j as f64 / n as f64;
        let mut step = f64::INFINITY;
        for _ in 0..50 {
            let (pv, dp) = p.eval_with_derivative(theta);
            let s = mean * theta + pv - p0;
            step = (s - target) / (mean + dp);
            theta -= step;
            if step.abs() < 1e-14 {
                break;
            }
        }
        if !(step.abs() < 1e-10) {
            return Err(Error::Numerical("arclength resampling did not converge".into()));
        }
        Ok(k.eval(theta))
    })?;
    Ok((h, kappa))
}

/// Spectrum of `-d²f/ds² = λ κ f` on a convex curve: uniform arclength
/// grid, second-order periodic differences, lumped diagonal weight `κ`.
pub fn curve_spectrum(geom: &CurveGeometry, count: usize) -> Result<SpectrumResult> {
    if count < 2 {
        return Err(Error::InvalidArgument("count must be at least 2".into()));
    }
    geom.require_strictly_convex()?;
    let (h, kappa) = arclength_resample(geom)?;
    if kappa.iter().any(|k| !(*k > 0.0)) {
        return Err(Error::Convexity("resampled curvature is not positive".into()));
    }
    let n = kappa.len();
    let c = 1.0 / (h * h);
    let pencil = Pencil::new(vec![2.0 * c; n], vec![-c; n - 1], -c, &kappa)?;
    let entries = pencil
        .lowest(count)
        .into_iter()
        .enumerate()
        .map(|(index, (lambda, f, residual))| SpectrumEntry {
            index,
            mode: sign_changes_cyclic(&f).div_ceil(2) as i32,
            lambda,
            residual,
        })
        .collect();
    Ok(SpectrumResult { entries, size: n })
}

/// Finite-volume Sturm–Liouville problem for `f = F(θ) e^{imϑ}` on a
/// surface of revolution in `R³`:
/// `-(R F'/W)' + m² (W/R) F = λ H_k W R F`, with `R = φ(ρ) sin θ`.
fn mode_pencil(geom: &AxisymGeometry, k: usize, mode: usize) -> Result<Pencil> {
    let m = geom.rho.len() - 1;
    let h = PI / m as f64;
    let space = geom.space;
    let flux: Vec<f64> = (0..m)
        .map(|j| {
            let rm = 0.5 * (geom.rho[j] + geom.rho[j + 1]);
            let dr = (geom.rho[j + 1] - geom.rho[j]) / h;
            let phi = space.phi(rm);
            let w = (phi * phi + dr * dr).sqrt();
            phi * ((j as f64 + 0.5) * h).sin() / w / h
        })
        .collect();
    let hk = |j: usize| geom.h_norm(k, j);
    let radius = |j: usize| geom.phi[j] * (j as f64 * h).sin();
    if mode == 0 {
        let mut diag = vec![0.0; m + 1];
        let mut off = vec![0.0; m];
        for j in 0..m {
            diag[j] += flux[j];
            diag[j + 1] += flux[j];
            off[j] = -flux[j];
        }
        let cap = |j: usize| geom.phi[j] * geom.phi[j] * (1.0 - (0.5 * h).cos());
        let mass: Vec<f64> = (0..=m)
            .map(|j| {
                if j == 0 || j == m {
                    hk(j) * cap(j)
                } else {
                    hk(j) * geom.speed[j] * radius(j) * h
                }
            })
            .collect();
        Pencil::new(diag, off, 0.0, &mass)
    } else {
        let q = (mode * mode) as f64;
        let inner = m - 1;
        let mut diag = vec![0.0; inner];
        let mut off = vec![0.0; inner - 1];
        let mut mass = vec![0.0; inner];
        for i in 0..inner {
            let j = i + 1;
            diag[i] = flux[j - 1] + flux[j] + q * h * geom.speed[j] / radius(j);
            if i + 1 < inner {
                off[i] = -flux[j];
            }
            mass[i] = hk(j) * geom.speed[j] * radius(j) * h;
        }
        Pencil::new(diag, off, 0.0, &mass)
    }
}

/// Spectrum of `-Δf = λ H_k f` on a surface of revolution in `R³`, merged
/// over the Fourier modes `0..=max_mode` (modes `m ≥ 1` appear twice,
/// labelled `±m`).
pub fn axisym_spectrum(geom: &AxisymGeometry, k: usize, max_mode: usize, count: usize) -> Result<SpectrumResult> {
    if geom.n != 3 {
        return Err(Error::InvalidArgument(format!("eigen-solving needs n = 3, got n = {}", geom.n)));
    }
    if max_mode < 1 || count < 2 {
        return Err(Error::InvalidArgument("need max_mode >= 1 and count >= 2".into()));
    }
    geom.require_k_convex(k)?;
    let per_mode = par::try_map_range(max_mode + 1, |mode| -> Result<Vec<(i32, f64, f64)>> {
        let pencil = mode_pencil(geom, k, mode)?;
        Ok(pencil
            .lowest(count)
            .into_iter()
            .map(|(lambda, _, residual)| (mode as i32, lambda, residual))
            .collect())
    })?;
    let mut all: Vec<(i32, f64, f64)> = Vec::new();
    for list in per_mode {
        for (mode, lambda, residual) in list {
            all.push((mode, lambda, residual));
            if mode > 0 {
                all.push((-mode, lambda, residual));
            }
        }
    }
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.abs().cmp(&b.0.abs())).then(b.0.cmp(&a.0)));
    all.truncate(count);
    let entries = all
        .into_iter()
        .enumerate()
        .map(|(index, (mode, lambda, residual))| SpectrumEntry { index, mode, lambda, residual })
        .collect();
    Ok(SpectrumResult { entries, size: geom.rho.len() })
}

/// Spectrum of either kind of shape.
pub fn spectrum(shape: &Shape, k: usize, max_mode: usize, count: usize) -> Result<SpectrumResult> {
    match shape.geometry()? {
        Geometry::Curve(g) => {
            if k != 1 {
                return Err(Error::InvalidArgument(format!("curves carry only k = 1, got k = {k}")));
            }
            curve_spectrum(&g, count)
        }
        Geometry::Axisym(g) => axisym_spectrum(&g, k, max_mode, count),
    }
}

/// `H_k`-weighted centre of mass (`∫ H_k x dμ / ∫ H_k dμ`); for
/// hypersurfaces of revolution only the axial coordinate is nonzero.
pub fn weighted_center(geom: &Geometry, k: usize) -> Vec<f64> {
    match geom {
        Geometry::Curve(g) => {
            let mass = g.integrate(|j| g.kappa[j]);
            let x = g.integrate(|j| g.kappa[j] * g.rho[j] * g.theta[j].cos());
            let y = g.integrate(|j| g.kappa[j] * g.rho[j] * g.theta[j].sin());
            vec![x / mass, y / mass]
        }
        Geometry::Axisym(g) => {
            let mass = g.integrate(|j| g.h_norm(k, j));
            let z = g.integrate(|j| g.h_norm(k, j) * g.rho[j] * g.theta[j].cos());
            vec![z / mass]
        }
    }
}

/// Translates a Euclidean shape so that its `H_k`-weighted centre sits at
/// the origin. Returns the shape and the accumulated translation.
pub fn recenter(shape: &Shape, k: usize) -> Result<(Shape, Vec<f64>)> {
    if shape.space().curvature() != 0 {
        return Err(Error::InvalidArgument("recentering needs K = 0".into()));
    }
    let mut current = shape.clone();
    let mut total = match shape {
        Shape::Curve(_) => vec![0.0, 0.0],
        Shape::Axisym(_) => vec![0.0],
    };
    let size = shape.rho().iter().copied().fold(0.0, f64::max);
    for _ in 0..6 {
        let c = weighted_center(&current.geometry()?, k);
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-13 * size {
            break;
        }
        current = match &current {
            Shape::Curve(cv) => Shape::Curve(ClosedCurve::translated(cv, [c[0], c[1]])?),
            Shape::Axisym(s) => Shape::Axisym(AxisymShape::shifted(s, c[0])?),
        };
        total.iter_mut().zip(&c).for_each(|(t, d)| *t += d);
    }
    Ok((current, total))
}

/// The upper bound for the first nonzero eigenvalue and its ingredients.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBound {
    pub bound: f64,
    /// `c_{n,k} ω^{-1/(n-k)} (∫H_{k-1})^{(n+1-k)/(n-k)} - k/(n-k+1) ∫H_{k-2}`
    pub bracket: f64,
    /// `|Σ|`
    pub area: f64,
    /// translation applied before evaluation
    pub center: Vec<f64>,
    pub terms: ThreeTerm,
}

/// `½ (n-1) |Σ| / bracket`, evaluated after recentering (`H_{-1} := u`).
pub fn eigen_bound(shape: &Shape, k: usize) -> Result<EigenBound> {
    let (centred, center) = recenter(shape, k)?;
    let geom = centred.geometry()?;
    match &geom {
        Geometry::Curve(g) => g.require_strictly_convex()?,
        Geometry::Axisym(g) => g.require_k_convex(k)?,
    }
    let n = geom.n();
    let terms = three_term(&geom, k)?;
    let kf = k as f64;
    let bracket = terms.rhs - kf / (n as f64 - kf + 1.0) * terms.lower;
    if !(bracket > 0.0) {
        return Err(Error::Numerical(format!("eigenvalue bound bracket is not positive ({bracket:e})")));
    }
    let area = match &geom {
        Geometry::Curve(g) => g.length,
        Geometry::Axisym(g) => g.area,
    };
    Ok(EigenBound { bound: 0.5 * (n as f64 - 1.0) * area / bracket, bracket, area, center, terms })
}

/// Compares the bound (lhs) with the computed first nonzero eigenvalue
/// (rhs); `count` eigenvalues are computed.
pub fn verify_eigen_bound(
    shape: &Shape,
    k: usize,
    max_mode: usize,
    count: usize,
) -> Result<(InequalityReport, SpectrumResult)> {
    let b = eigen_bound(shape, k)?;
    let spec = spectrum(shape, k, max_mode, count)?;
    let lambda1 = spec.lambda1()?;
    let params = json!({
        "K": shape.space().curvature(),
        "n": shape.n(),
        "samples": shape.rho().len(),
        "k": k,
        "lambda1": lambda1,
        "bracket": b.bracket,
        "center": b.center,
        "max_residual": spec.max_residual(),
    });
    let mut report = InequalityReport::new("eigen-bound", params, b.bound, lambda1, TOL_AXISYM, shape_digest(shape));
    if k == 1 {
        report.notes.push("H_{-1} is taken to be the support function u".into());
    }
    Ok((report, spec))
}

#[cfg(test)]
mod tests;
