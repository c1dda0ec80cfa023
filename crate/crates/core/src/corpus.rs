//! Seeded random shape corpora for sweeps and batteries.
//!
//! Shapes are small band-limited perturbations of a centred geodesic
//! sphere: Fourier modes for curves, Legendre modes for surfaces of
//! revolution. Coefficient `k` is drawn uniformly from
//! `[-amp, amp] · r0 / k²`; draws that miss the requested convexity
//! class are rejected and redrawn. Shape `i` uses its own ChaCha stream,
//! so a corpus does not depend on the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::axisym::{axisym_geometry, convexity_class, AxisymShape, ShapeSpec};
use crate::curve2d::{curve_geometry, ClosedCurve, CurveSpec};
use crate::error::{Error, Result};
use crate::par;
use crate::spaceform::SpaceForm;

/// Redraws allowed per shape before giving up.
pub const MAX_TRIES: usize = 200;

/// Required convexity margin (`min κ · L` for curves, `min κ · r0` or
/// `(min κ - 1)` for surfaces).
pub const MARGIN: f64 = 0.05;

/// What a generated shape must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvexityReq {
    /// strictly convex (curves, or all principal curvatures positive)
    Convex,
    /// `H_1, …, H_k > 0`
    KConvex(usize),
    /// all principal curvatures `≥ 1` (hyperbolic space)
    HConvex,
}

/// Corpus parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub count: usize,
    /// perturbation amplitude relative to the base radius
    pub amp: f64,
    pub seed: u64,
    /// highest Fourier/Legendre mode
    #[serde(default = "default_modes")]
    pub modes: usize,
    /// base radius; the space form's default when absent
    #[serde(default)]
    pub radius: Option<f64>,
}

fn default_modes() -> usize {
    4
}

impl CorpusSpec {
    pub fn new(count: usize, amp: f64, seed: u64) -> Self {
        CorpusSpec { count, amp, seed, modes: default_modes(), radius: None }
    }

    fn validate(&self) -> Result<()> {
        if !(self.amp >= 0.0 && self.amp < 1.0) {
            return Err(Error::InvalidArgument(format!("amplitude must lie in [0, 1), got {}", self.amp)));
        }
        if self.modes == 0 {
            return Err(Error::InvalidArgument("need at least one mode".into()));
        }
        if let Some(r) = self.radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
            }
        }
        Ok(())
    }

    fn base_radius(&self, space: SpaceForm) -> f64 {
        self.radius.unwrap_or(match space.curvature() {
            1 => 0.8,
            _ => 1.0,
        })
    }

    fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    fn draw(&self, rng: &mut ChaCha8Rng, r0: f64, k: usize) -> f64 {
        rng.gen_range(-self.amp..=self.amp) * r0 / (k * k) as f64
    }
}

/// Random strictly convex curves in `M²(K)`.
pub fn curve_corpus(space: SpaceForm, spec: &CorpusSpec, n: usize) -> Result<Vec<(CurveSpec, ClosedCurve)>> {
    spec.validate()?;
    let r0 = spec.base_radius(space);
    par::try_map_range(spec.count, |i| {
        let mut rng = spec.rng(i);
        for _ in 0..MAX_TRIES {
            let mut cos = Vec::with_capacity(spec.modes);
            let mut sin = Vec::with_capacity(spec.modes);
            for k in 1..=spec.modes {
                cos.push(spec.draw(&mut rng, r0, k));
                sin.push(spec.draw(&mut rng, r0, k));
            }
            let cs = CurveSpec::RadialFourier { a0: r0, cos, sin };
            let Ok(c) = cs.build(space, n) else { continue };
            let Ok(geom) = curve_geometry(&c) else { continue };
            if geom.min_kappa() * geom.length >= MARGIN {
                return Ok((cs, c));
            }
        }
        Err(give_up(i))
    })
}

/// Random surfaces of revolution in `M^n(K)` of the requested class.
pub fn axisym_corpus(
    space: SpaceForm,
    n: usize,
    req: ConvexityReq,
    spec: &CorpusSpec,
    m: usize,
) -> Result<Vec<(ShapeSpec, AxisymShape)>> {
    spec.validate()?;
    if let ConvexityReq::KConvex(k) = req {
        if k == 0 || k >= n {
            return Err(Error::InvalidArgument(format!("k-convexity needs 1 <= k <= n - 1, got {k}")));
        }
    }
    if req == ConvexityReq::HConvex && space.curvature() != -1 {
        return Err(Error::InvalidArgument("h-convex corpora live in hyperbolic space".into()));
    }
    let r0 = spec.base_radius(space);
    par::try_map_range(spec.count, |i| {
        let mut rng = spec.rng(i);
        for _ in 0..MAX_TRIES {
            let coeffs = (1..=spec.modes).map(|k| spec.draw(&mut rng, r0, k)).collect();
            let ss = ShapeSpec::Legendre { a0: r0, coeffs };
            let Ok(s) = ss.build(space, n, m) else { continue };
            let Ok(geom) = axisym_geometry(&s) else { continue };
            let class = convexity_class(&geom);
            let ok = match req {
                ConvexityReq::Convex => class.min_curvature * r0 >= MARGIN,
                ConvexityReq::KConvex(k) => class.k_convex_margin(k) >= MARGIN * r0.powi(-(k as i32)),
                ConvexityReq::HConvex => class.h_convex_margin() >= MARGIN,
            };
            if ok {
                return Ok((ss, s));
            }
        }
        Err(give_up(i))
    })
}

fn give_up(i: usize) -> Error {
    Error::Numerical(format!("corpus shape {i}: no admissible draw in {MAX_TRIES} tries (lower the amplitude)"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_are_convex_and_reproducible() {
        let spec = CorpusSpec::new(12, 0.15, 7);
        for k in [-1, 0, 1] {
            let space = SpaceForm::new(k).unwrap();
            let a = curve_corpus(space, &spec, 128).unwrap();
            let b = curve_corpus(space, &spec, 128).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.len(), 12);
            for (_, c) in &a {
                assert!(curve_geometry(c).unwrap().is_strictly_convex());
                assert!(c.roundness() > 0.0);
            }
        }
        let other = curve_corpus(SpaceForm::EUCLIDEAN, &CorpusSpec::new(12, 0.15, 8), 128).unwrap();
        assert_ne!(other, curve_corpus(SpaceForm::EUCLIDEAN, &spec, 128).unwrap());
    }

    #[test]
    fn surfaces_meet_their_class() {
        let spec = CorpusSpec::new(6, 0.1, 3);
        let cases = [
            (SpaceForm::EUCLIDEAN, ConvexityReq::KConvex(2)),
            (SpaceForm::HYPERBOLIC, ConvexityReq::HConvex),
            (SpaceForm::SPHERE, ConvexityReq::Convex),
        ];
        for (space, req) in cases {
            let shapes = axisym_corpus(space, 3, req, &spec, 128).unwrap();
            assert_eq!(shapes.len(), 6);
            for (_, s) in &shapes {
                let class = convexity_class(&axisym_geometry(s).unwrap());
                match req {
                    ConvexityReq::KConvex(k) => assert!(class.k_convex(k)),
                    ConvexityReq::HConvex => assert!(class.h_convex()),
                    ConvexityReq::Convex => assert!(class.strictly_convex()),
                }
            }
        }
    }

    #[test]
    fn bad_requests_fail() {
        let space = SpaceForm::EUCLIDEAN;
        assert!(curve_corpus(space, &CorpusSpec::new(3, 1.5, 0), 64).is_err());
        assert!(axisym_corpus(space, 3, ConvexityReq::HConvex, &CorpusSpec::new(3, 0.1, 0), 64).is_err());
        assert!(axisym_corpus(space, 3, ConvexityReq::KConvex(3), &CorpusSpec::new(3, 0.1, 0), 64).is_err());
        // high-mode amplitudes near 1 exhaust the retry budget
        let wild = CorpusSpec { modes: 12, ..CorpusSpec::new(2, 0.99, 1) };
        let err = curve_corpus(space, &wild, 64).unwrap_err();
        assert!(err.is_numerical(), "{err}");
    }
}
