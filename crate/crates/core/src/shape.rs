//! A curve (`n = 2`) or a hypersurface of revolution (`n ≥ 3`) behind one
//! interface, with its per-sample geometry.

use crate::axisym::{axisym_geometry, AxisymGeometry, AxisymShape};
use crate::curve2d::{curve_geometry, ClosedCurve, CurveGeometry};
use crate::error::Result;
use crate::spaceform::SpaceForm;

/// A curve (`n = 2`) or a hypersurface of revolution (`n ≥ 3`).
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Curve(ClosedCurve),
    Axisym(AxisymShape),
}

/// Geometry of a [`Shape`].
#[derive(Debug, Clone)]
pub enum Geometry {
    Curve(CurveGeometry),
    Axisym(AxisymGeometry),
}

impl Shape {
    pub fn space(&self) -> SpaceForm {
        match self {
            Shape::Curve(c) => c.space(),
            Shape::Axisym(s) => s.space(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Shape::Curve(_) => 2,
            Shape::Axisym(s) => s.n(),
        }
    }

    pub fn rho(&self) -> &[f64] {
        match self {
            Shape::Curve(c) => c.rho(),
            Shape::Axisym(s) => s.rho(),
        }
    }

    pub fn roundness(&self) -> f64 {
        match self {
            Shape::Curve(c) => c.roundness(),
            Shape::Axisym(s) => s.roundness(),
        }
    }

    pub fn geometry(&self) -> Result<Geometry> {
        Ok(match self {
            Shape::Curve(c) => Geometry::Curve(curve_geometry(c)?),
            Shape::Axisym(s) => Geometry::Axisym(axisym_geometry(s)?),
        })
    }

    pub(crate) fn with_rho(&self, rho: Vec<f64>) -> Result<Shape> {
        Ok(match self {
            Shape::Curve(c) => Shape::Curve(ClosedCurve::new(c.space(), rho)?),
            Shape::Axisym(s) => Shape::Axisym(AxisymShape::from_regular(s.space(), s.n(), rho)?),
        })
    }

    /// Samples as JSON (`{"space":K,"n":n,"rho":[…]}`).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "space": self.space().curvature(),
            "n": self.n(),
            "rho": self.rho(),
        })
    }
}

impl Geometry {
    pub fn len(&self) -> usize {
        match self {
            Geometry::Curve(g) => g.n(),
            Geometry::Axisym(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n(&self) -> usize {
        match self {
            Geometry::Curve(_) => 2,
            Geometry::Axisym(g) => g.n,
        }
    }

    pub(crate) fn sample(&self, j: usize) -> Sample {
        match self {
            Geometry::Curve(g) => Sample {
                k1: g.kappa[j],
                k2: g.kappa[j],
                phi: g.phi[j],
                dphi: g.dphi[j],
                u: g.u[j],
                speed: g.speed[j],
            },
            Geometry::Axisym(g) => Sample {
                k1: g.kappa1[j],
                k2: g.kappa2[j],
                phi: g.phi[j],
                dphi: g.dphi[j],
                u: g.u[j],
                speed: g.speed[j],
            },
        }
    }
}

pub(crate) struct Sample {
    pub k1: f64,
    pub k2: f64,
    pub phi: f64,
    pub dphi: f64,
    pub u: f64,
    pub speed: f64,
}

