//! The worked special cases of the two-dimensional weighted Minkowski
//! inequality: for each weight, the right-hand side as an explicit function
//! of the length `L`.

use std::f64::consts::PI;

use serde_json::json;

use super::{verify_minkowski2d_with, InequalityReport};
use crate::curve2d::{curve_geometry, minkowski2d_rhs, ClosedCurve};
use crate::error::{Error, Result};
use crate::spaceform::{SpaceForm, Weight};

/// One weight of the catalog with its printed right-hand side.
#[derive(Debug, Clone, Copy)]
pub struct Example14Item {
    /// curvature of the space form
    pub space: i32,
    /// 1-based position in its list
    pub index: usize,
    pub weight: &'static str,
    pub closed_form: fn(f64) -> f64,
}

impl Example14Item {
    pub fn weight(&self) -> Weight {
        Weight::parse(self.weight).expect("catalog weights are valid")
    }

    /// `rhs(L)` from the general formula.
    pub fn general(&self, l: f64) -> Result<f64> {
        minkowski2d_rhs(SpaceForm::new(self.space)?, &self.weight(), l)
    }

    /// Largest `|general - closed form| / scale` over `lengths`.
    pub fn cross_check(&self, lengths: &[f64]) -> Result<f64> {
        let mut worst = 0.0f64;
        for &l in lengths {
            let a = self.general(l)?;
            let b = (self.closed_form)(l);
            let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
            worst = worst.max((a - b).abs() / scale);
        }
        Ok(worst)
    }
}

fn sq(l: f64) -> f64 {
    l * l
}

fn root_s(l: f64) -> f64 {
    (4.0 * PI * PI - l * l).sqrt()
}

fn root_h(l: f64) -> f64 {
    (l * l + 4.0 * PI * PI).sqrt()
}

const EUCLIDEAN: [Example14Item; 7] = [
    Example14Item { space: 0, index: 1, weight: "monomial:1", closed_form: |l| sq(l) / (2.0 * PI) },
    Example14Item {
        space: 0,
        index: 2,
        weight: "monomial:1.5:0.9428090415820634",
        closed_form: |l| l.powi(3) / (6.0 * PI * PI),
    },
    Example14Item { space: 0, index: 3, weight: "monomial:2", closed_form: |l| l.powi(4) / (16.0 * PI.powi(3)) },
    Example14Item {
        space: 0,
        index: 4,
        weight: "exp",
        closed_form: |l| 2.0 * PI * (2.0 * (sq(l) / (8.0 * PI * PI)).exp() - 1.0),
    },
    Example14Item {
        space: 0,
        index: 5,
        weight: "exp-sq",
        closed_form: |l| 2.0 * PI * (2.0 * (l.powi(4) / (64.0 * PI.powi(4))).exp() - 1.0),
    },
    Example14Item {
        space: 0,
        index: 6,
        weight: "sinh",
        closed_form: |l| 4.0 * PI * (sq(l) / (8.0 * PI * PI)).sinh(),
    },
    Example14Item {
        space: 0,
        index: 7,
        weight: "cosh",
        closed_form: |l| 4.0 * PI * (sq(l) / (8.0 * PI * PI)).cosh() - 2.0 * PI,
    },
];

const SPHERICAL: [Example14Item; 5] = [
    Example14Item { space: 1, index: 1, weight: "monomial:1", closed_form: |l| sq(l) / (2.0 * PI) },
    Example14Item {
        space: 1,
        index: 2,
        weight: "monomial:2",
        closed_form: |l| {
            4.0 / 3.0 * (root_s(l) - 2.0 * PI) - sq(l) / (3.0 * PI * PI) * (root_s(l) - 3.0 * PI)
        },
    },
    Example14Item {
        space: 1,
        index: 3,
        weight: "monomial:3",
        closed_form: |l| {
            -3.0 * l.powi(4) / (16.0 * PI.powi(3)) - sq(l) / (PI * PI) * (root_s(l) - 3.0 * PI) + 4.0 * root_s(l)
                - 8.0 * PI
        },
    },
    Example14Item {
        space: 1,
        index: 4,
        weight: "rational-minus:1",
        closed_form: |l| 4.0 * PI * (2.0 * PI / root_s(l)).ln(),
    },
    Example14Item {
        space: 1,
        index: 5,
        weight: "rational-minus:2",
        closed_form: |l| 4.0 * PI * (2.0 * PI / root_s(l)).ln() - sq(l) / (2.0 * PI),
    },
];

const HYPERBOLIC: [Example14Item; 4] = [
    Example14Item { space: -1, index: 1, weight: "monomial:1", closed_form: |l| sq(l) / (2.0 * PI) },
    Example14Item {
        space: -1,
        index: 2,
        weight: "monomial:2",
        closed_form: |l| {
            sq(l) / (3.0 * PI * PI) * (root_h(l) - 3.0 * PI) + 4.0 / 3.0 * (root_h(l) - 2.0 * PI)
        },
    },
    Example14Item {
        space: -1,
        index: 3,
        weight: "monomial:3",
        closed_form: |l| {
            3.0 * l.powi(4) / (16.0 * PI.powi(3)) - sq(l) / (PI * PI) * (root_h(l) - 3.0 * PI) - 4.0 * root_h(l)
                + 8.0 * PI
        },
    },
    Example14Item {
        space: -1,
        index: 4,
        weight: "rational-plus:2",
        closed_form: |l| sq(l) / (2.0 * PI) - 2.0 * PI * (sq(l) / (4.0 * PI * PI) + 1.0).ln(),
    },
];

/// The catalog for one space form (7, 5 and 4 items for K = 0, 1, -1).
pub fn example_1_4_items(space: SpaceForm) -> &'static [Example14Item] {
    match space.curvature() {
        0 => &EUCLIDEAN,
        1 => &SPHERICAL,
        _ => &HYPERBOLIC,
    }
}

/// `count` equispaced lengths inside the range where every item of the
/// catalog is defined (`L < 2π` on the sphere). Below `L ≈ 2` the printed
/// spherical forms lose more than ten digits to cancellation.
pub fn sample_lengths(space: SpaceForm, count: usize) -> Vec<f64> {
    let (a, b) = match space.curvature() {
        1 => (2.0, 2.0 * PI - 0.3),
        _ => (1.0, 12.0),
    };
    if count == 1 {
        return vec![a];
    }
    (0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect()
}

/// Runs the weighted Minkowski verifier with every catalog weight of the
/// curve's space form.
pub fn example_1_4_suite(space: SpaceForm, curve: &ClosedCurve) -> Result<Vec<InequalityReport>> {
    if curve.space() != space {
        return Err(Error::InvalidArgument(format!(
            "curve lives in K = {}, suite requested for K = {}",
            curve.space().curvature(),
            space.curvature()
        )));
    }
    let geom = curve_geometry(curve)?;
    example_1_4_items(space)
        .iter()
        .map(|item| {
            let mut r = verify_minkowski2d_with(curve, &geom, &item.weight())?;
            r.theorem = "example-1.4".into();
            if let serde_json::Value::Object(m) = &mut r.params {
                m.insert("item".into(), json!(item.index));
                m.insert("closed_form_rhs".into(), json!((item.closed_form)(geom.length)));
            }
            Ok(r)
        })
        .collect()
}
