//! Space forms of constant curvature `K ∈ {-1, 0, 1}`, viewed as warped
//! products `dr² + φ(r)² g_sphere`, together with the closed-form quantities
//! of geodesic balls and spheres used as comparison profiles.

mod weight;

pub use weight::{Preset, Weight};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad;

/// Space form `M^n(K)`; the dimension is supplied by callers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct SpaceForm {
    curvature: i32,
}

impl TryFrom<i32> for SpaceForm {
    type Error = Error;
    fn try_from(k: i32) -> Result<Self> {
        SpaceForm::new(k)
    }
}

impl From<SpaceForm> for i32 {
    fn from(s: SpaceForm) -> i32 {
        s.curvature
    }
}

impl SpaceForm {
    pub const EUCLIDEAN: SpaceForm = SpaceForm { curvature: 0 };
    pub const HYPERBOLIC: SpaceForm = SpaceForm { curvature: -1 };
    pub const SPHERE: SpaceForm = SpaceForm { curvature: 1 };

    /// Builds the space form with sectional curvature `k`.
    pub fn new(k: i32) -> Result<Self> {
        match k {
            -1 | 0 | 1 => Ok(SpaceForm { curvature: k }),
            _ => Err(Error::InvalidArgument(format!(
                "curvature must be -1, 0 or 1, got {k}"
            ))),
        }
    }

    #[inline]
    pub fn curvature(&self) -> i32 {
        self.curvature
    }

    #[inline]
    pub fn k(&self) -> f64 {
        self.curvature as f64
    }

    pub fn name(&self) -> &'static str {
        match self.curvature {
            0 => "euclidean",
            -1 => "hyperbolic",
            _ => "sphere",
        }
    }

    /// Upper end of the radial coordinate (exclusive).
    pub fn r_max(&self) -> f64 {
        if self.curvature == 1 {
            PI
        } else {
            f64::INFINITY
        }
    }

    /// Radial bound for convex geodesic balls: the open hemisphere when `K = 1`.
    pub fn convex_r_max(&self) -> f64 {
        if self.curvature == 1 {
            0.5 * PI
        } else {
            f64::INFINITY
        }
    }

    /// Warp function φ.
    #[inline]
    pub fn phi(&self, r: f64) -> f64 {
        match self.curvature {
            0 => r,
            -1 => r.sinh(),
            _ => r.sin(),
        }
    }

    /// φ'.
    #[inline]
    pub fn dphi(&self, r: f64) -> f64 {
        match self.curvature {
            0 => 1.0,
            -1 => r.cosh(),
            _ => r.cos(),
        }
    }

    /// φ'' = -K φ.
    #[inline]
    pub fn ddphi(&self, r: f64) -> f64 {
        -self.k() * self.phi(r)
    }

    /// The potential Φ(r) = ∫₀ʳ φ.
    #[inline]
    pub fn potential(&self, r: f64) -> f64 {
        match self.curvature {
            0 => 0.5 * r * r,
            // cosh r - 1 without cancellation
            -1 => 2.0 * (0.5 * r).sinh().powi(2),
            _ => 2.0 * (0.5 * r).sin().powi(2),
        }
    }

    /// Inverse of φ on the branch used for convex balls.
    pub fn phi_inv(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::Domain(format!("phi^-1 of negative value {y}")));
        }
        match self.curvature {
            0 => Ok(y),
            -1 => Ok(y.asinh()),
            _ => {
                if y > 1.0 {
                    Err(Error::Domain(format!("phi^-1({y}) undefined on the sphere")))
                } else {
                    Ok(y.asin())
                }
            }
        }
    }

    pub(crate) fn check_radius(&self, r: f64, what: &str) -> Result<()> {
        if !(r >= 0.0 && r < self.r_max()) {
            return Err(Error::Domain(format!(
                "{what}: radius {r} outside [0, {}) in the {} space form",
                self.r_max(),
                self.name()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_convex_radius(&self, r: f64, what: &str) -> Result<()> {
        if !(r > 0.0 && r < self.convex_r_max()) {
            return Err(Error::Domain(format!(
                "{what}: radius {r} outside (0, {}) in the {} space form",
                self.convex_r_max(),
                self.name()
            )));
        }
        Ok(())
    }

    /// Area of the geodesic sphere of radius `r` in `M^n(K)`.
    pub fn sphere_area(&self, n: usize, r: f64) -> f64 {
        unit_sphere_area(n - 1) * self.phi(r).powi(n as i32 - 1)
    }

    /// Volume of the geodesic ball of radius `r` in `M^n(K)`.
    pub fn ball_volume(&self, n: usize, r: f64) -> Result<f64> {
        self.check_radius(r, "ball_volume")?;
        let e = n as i32 - 1;
        let inner = quad::integrate_default(|s| self.phi(s).powi(e), 0.0, r)?;
        Ok(unit_sphere_area(n - 1) * inner)
    }

    /// ∫_{B(r)} φ' dv = ω_{n-1} φ(r)ⁿ / n.
    pub fn ball_phi_prime_volume(&self, n: usize, r: f64) -> f64 {
        unit_sphere_area(n - 1) * self.phi(r).powi(n as i32) / n as f64
    }

    /// Area of the geodesic disc in `M²(K)` whose boundary has length `l`.
    pub fn disc_area_from_length(&self, l: f64) -> Result<f64> {
        let r = self.phi_inv(l / (2.0 * PI))?;
        Ok(2.0 * PI * self.potential(r))
    }
}

/// `ω_m = |S^m|` for `m ≥ 1`.
pub fn unit_sphere_area(m: usize) -> f64 {
    assert!(m >= 1, "unit_sphere_area needs m >= 1");
    let a = 0.5 * (m as f64 + 1.0);
    2.0 * PI.powf(a) / statrs::function::gamma::gamma(a)
}

/// Checked variant of [`unit_sphere_area`].
pub fn try_unit_sphere_area(m: i64) -> Result<f64> {
    if m < 1 {
        return Err(Error::InvalidArgument(format!("unit sphere dimension {m} < 1")));
    }
    Ok(unit_sphere_area(m as usize))
}

/// Weighted volume `A_g(B(r)) = ω_{n-1} ∫₀ʳ (g'(Φ)φ' + K g(Φ)) φ^{n-1} ds`.
pub fn ball_ag(space: SpaceForm, n: usize, g: &Weight, r: f64) -> Result<f64> {
    space.check_radius(r, "ball_Ag")?;
    g.check_value(space.potential(r))?;
    Ok(unit_sphere_area(n - 1) * radial_ag_integral(space, n, g, r)?)
}

/// Inner radial integral `∫₀ʳ (g'(Φ)φ' + K g(Φ)) φ^{n-1} ds` shared by the
/// ball, curve and axisymmetric weighted volumes.
pub(crate) fn radial_ag_integral(space: SpaceForm, n: usize, g: &Weight, r: f64) -> Result<f64> {
    let e = n as i32 - 1;
    let k = space.k();
    quad::integrate_default(
        |s| {
            let p = space.potential(s);
            (g.dg(p) * space.dphi(s) + k * g.g(p)) * space.phi(s).powi(e)
        },
        0.0,
        r,
    )
}

/// `∫_{S(r)} g(Φ) H dμ` for the geodesic sphere, whose mean curvature is
/// `(n-1) φ'/φ`.
pub fn sphere_weighted_h(space: SpaceForm, n: usize, g: &Weight, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < space.r_max()) {
        return Err(Error::Domain(format!("sphere_weighted_H: radius {r} out of range")));
    }
    let p = space.potential(r);
    g.check_value(p)?;
    Ok(unit_sphere_area(n - 1)
        * (n as f64 - 1.0)
        * g.g(p)
        * space.dphi(r)
        * space.phi(r).powi(n as i32 - 2))
}
