//! Adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Relative tolerance used throughout for radial integrals.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

const MAX_INTERVALS: usize = 400;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let s = f(center - dx) + f(center + dx);
        kronrod += w * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]` until the estimated error is below
/// `max(rel_tol * |I|, abs_tol)`.
///
/// Returns an error if the integrand produces non-finite values or the
/// interval budget is exhausted.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (value, error) = kronrod15(&f, a, b);
    if !value.is_finite() {
        return Err(Error::NonFinite(format!("integrand on [{a}, {b}]")));
    }
    let mut segments = vec![Segment { a, b, value, error }];
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let err: f64 = segments.iter().map(|s| s.error).sum();
        if err <= (rel_tol * total.abs()).max(abs_tol) {
            return Ok(total);
        }
        if segments.len() >= MAX_INTERVALS {
            return Err(Error::Numerical(format!(
                "quadrature did not converge on [{a}, {b}] (error {err:e})"
            )));
        }
        let (idx, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let seg = segments.swap_remove(idx);
        let mid = 0.5 * (seg.a + seg.b);
        for (lo, hi) in [(seg.a, mid), (mid, seg.b)] {
            let (value, error) = kronrod15(&f, lo, hi);
            if !value.is_finite() {
                return Err(Error::NonFinite(format!("integrand on [{lo}, {hi}]")));
            }
            segments.push(Segment { a: lo, b: hi, value, error });
        }
    }
}

/// [`integrate`] with the crate-wide default relative tolerance and a tiny
/// absolute floor (so identically zero integrands terminate).
pub fn integrate_default<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate(f, a, b, DEFAULT_REL_TOL, 1e-300)
}

/// Composite Simpson rule on a uniform grid with an even number of panels.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let m = values.len() - 1;
    debug_assert!(m % 2 == 0 && m >= 2, "simpson needs an even panel count");
    let mut acc = values[0] + values[m];
    for (j, v) in values.iter().enumerate().take(m).skip(1) {
        acc += if j % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

/// Composite Simpson weights for `m + 1` uniform nodes (`m` even).
pub fn simpson_weights(m: usize, h: f64) -> Vec<f64> {
    debug_assert!(m % 2 == 0 && m >= 2, "simpson needs an even panel count");
    (0..=m)
        .map(|j| {
            let c = if j == 0 || j == m {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_polynomials_exactly() {
        // K15 is exact up to degree 29
        let v = integrate_default(|x| x.powi(9) - 3.0 * x * x, 0.0, 2.0).unwrap();
        assert_relative_eq!(v, 1024.0 / 10.0 - 8.0, max_relative = 1e-14);
    }

    #[test]
    fn integrates_peaked_function() {
        let v = integrate_default(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert_relative_eq!(v, exact, max_relative = 1e-10);
    }

    #[test]
    fn zero_integrand_terminates() {
        assert_eq!(integrate_default(|_| 0.0, 0.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_is_reported() {
        let err = integrate_default(|x| 1.0 / (x - 0.5), 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_) | Error::Numerical(_)));
    }

    #[test]
    fn simpson_is_fourth_order() {
        let err = |m: usize| {
            let h = std::f64::consts::PI / m as f64;
            let v: Vec<f64> = (0..=m).map(|j| (j as f64 * h).sin()).collect();
            (simpson(&v, h) - 2.0).abs()
        };
        let ratio = err(20) / err(40);
        assert!(ratio > 15.0 && ratio < 17.0, "ratio {ratio}");
    }
}
