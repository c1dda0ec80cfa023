use std::f64::consts::PI;

use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};

use super::*;
use crate::axisym::{axisym_geometry, ShapeSpec};
use crate::curve2d::{curve_geometry, CurveSpec};
use crate::inequalities::InequalityVerdict;
use crate::spaceform::SpaceForm;

fn curve(spec: &str, n: usize) -> ClosedCurve {
    CurveSpec::parse(spec).unwrap().build(SpaceForm::EUCLIDEAN, n).unwrap()
}

fn surface(spec: &str, n: usize, m: usize) -> AxisymShape {
    ShapeSpec::parse(spec).unwrap().build(SpaceForm::EUCLIDEAN, n, m).unwrap()
}

#[test]
fn circle_spectrum() {
    for r in [1.0, 2.0] {
        let g = curve_geometry(&curve(&format!("circle:{r}"), 2048)).unwrap();
        let s = curve_spectrum(&g, 5).unwrap();
        let l = s.lambdas();
        assert!(l[0].abs() <= 1e-8 * l[1], "{l:?}");
        for i in [1, 2] {
            assert!((l[i] - 1.0 / r).abs() < 1e-4, "r={r}: {l:?}");
            assert_eq!(s.entries[i].mode, 1);
        }
        for i in [3, 4] {
            assert!((l[i] - 4.0 / r).abs() < 1e-3, "r={r}: {l:?}");
            assert_eq!(s.entries[i].mode, 2);
        }
        assert!(s.max_residual() <= 1e-6, "{}", s.max_residual());
        assert_eq!(s.entries[0].mode, 0);
    }
}

#[test]
fn curve_lambda1_matches_constrained_minimisation() {
    // Oracle: minimise the discrete Rayleigh quotient over {∫κ f ds = 0}
    // with a dense reduced generalized eigenproblem.
    let g = curve_geometry(&curve("ellipse:2:1", 128)).unwrap();
    let (h, kappa) = arclength_resample(&g).unwrap();
    let n = kappa.len();
    let c = 1.0 / (h * h);
    let mut a = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        a[(j, j)] = 2.0 * c;
        a[(j, (j + 1) % n)] = -c;
        a[((j + 1) % n, j)] = -c;
    }
    let b = DMatrix::from_diagonal(&DVector::from_vec(kappa.clone()));
    // orthonormal basis of the complement of B·1
    let w = DVector::from_vec(kappa.clone()).normalize();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for i in 0..n {
        let mut v = DVector::<f64>::zeros(n);
        v[i] = 1.0;
        v -= &w * w.dot(&v);
        for q in &basis {
            v -= q * q.dot(&v);
        }
        if v.norm() > 1e-8 {
            basis.push(v.normalize());
        }
        if basis.len() == n - 1 {
            break;
        }
    }
    let q = DMatrix::from_columns(&basis);
    let ar = q.transpose() * &a * &q;
    let br = q.transpose() * &b * &q;
    let l = br.cholesky().unwrap().l();
    let li = l.clone().try_inverse().unwrap();
    let sym = &li * ar * li.transpose();
    let sym = 0.5 * (&sym + sym.transpose());
    let oracle = sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);

    let s = curve_spectrum(&g, 3).unwrap();
    assert_relative_eq!(s.lambda1().unwrap(), oracle, max_relative = 1e-6);
}

#[test]
fn ellipse_mesh_convergence_order() {
    let l: Vec<f64> = [512, 1024, 2048]
        .iter()
        .map(|&n| curve_spectrum(&curve_geometry(&curve("ellipse:2:1", n)).unwrap(), 3).unwrap().lambda1().unwrap())
        .collect();
    let order = ((l[0] - l[1]) / (l[1] - l[2])).abs().log2();
    assert!(order >= 2.0, "observed order {order}: {l:?}");
}

#[test]
fn sphere_spectrum() {
    let cases = [(1.0, 1, 2.0), (2.0, 1, 1.0), (1.0, 2, 2.0)];
    for (r, k, expected) in cases {
        let g = axisym_geometry(&surface(&format!("sphere:{r}"), 3, 800)).unwrap();
        let s = axisym_spectrum(&g, k, DEFAULT_MAX_MODE, 6).unwrap();
        let l = s.lambdas();
        assert!(l[0].abs() <= 1e-8 * l[1], "{l:?}");
        assert_eq!(s.entries[0].mode, 0);
        // ℓ = 1 is triple: m = 0 and m = ±1
        for i in 1..=3 {
            assert!((l[i] - expected).abs() < 1e-4, "R={r} k={k}: {l:?}");
        }
        let mut modes: Vec<i32> = s.entries[1..=3].iter().map(|e| e.mode).collect();
        modes.sort();
        assert_eq!(modes, vec![-1, 0, 1]);
        assert!(l[4] > 2.5 * expected);
        assert!(s.max_residual() <= 1e-6);
    }
}

#[test]
fn spectrum_preconditions() {
    let g = axisym_geometry(&surface("sphere:1", 4, 200)).unwrap();
    assert!(axisym_spectrum(&g, 1, 3, 4).is_err());
    let g = axisym_geometry(&surface("sphere:1", 3, 200)).unwrap();
    assert!(axisym_spectrum(&g, 1, 0, 4).is_err());
    let g = curve_geometry(&curve("fourier:1:0:0:0:0:0:0:0.3", 256)).unwrap();
    assert!(matches!(curve_spectrum(&g, 4), Err(Error::Convexity(_))));
}

#[test]
fn bound_examples() {
    for r in [0.5, 2.0] {
        let b = eigen_bound(&Shape::Curve(curve(&format!("circle:{r}"), 256)), 1).unwrap();
        assert_relative_eq!(b.bound, 1.0 / r, max_relative = 1e-10);
        let s = Shape::Axisym(surface(&format!("sphere:{r}"), 3, 800));
        let b = eigen_bound(&s, 1).unwrap();
        assert_relative_eq!(b.bracket, 2.0 * PI * r * r * r, max_relative = 1e-8);
        assert_relative_eq!(b.bound, 2.0 / r, max_relative = 1e-8);
        assert_relative_eq!(eigen_bound(&s, 2).unwrap().bound, 2.0, max_relative = 1e-8);
    }
    // round spheres in R⁴: λ₁ = (n-1)/R² divided by H_k = R^{-k}
    let r: f64 = 1.3;
    let s = Shape::Axisym(surface(&format!("sphere:{r}"), 4, 800));
    for k in 1..=3 {
        let b = eigen_bound(&s, k).unwrap();
        assert_relative_eq!(b.bound, 3.0 * r.powi(k as i32 - 2), max_relative = 1e-8);
    }
}

#[test]
fn bound_is_translation_normalised() {
    let centred = eigen_bound(&Shape::Curve(curve("ellipse:2:1", 512)), 1).unwrap();
    let moved = curve("ellipse:2:1", 512).translated([0.3, -0.2]).unwrap();
    let b = eigen_bound(&Shape::Curve(moved), 1).unwrap();
    assert_relative_eq!(b.bound, centred.bound, max_relative = 1e-9);
    assert_relative_eq!(b.center[0], -0.3, epsilon = 1e-9);
    assert_relative_eq!(b.center[1], 0.2, epsilon = 1e-9);

    let s = Shape::Axisym(surface("offset_sphere:1:0.3", 3, 800));
    let b = eigen_bound(&s, 1).unwrap();
    assert_relative_eq!(b.bound, 2.0, max_relative = 1e-6);
    assert_relative_eq!(b.center[0], 0.3, epsilon = 1e-6);
}

#[test]
fn verifier_reports() {
    let (r, spec) = verify_eigen_bound(&Shape::Curve(curve("circle:2", 2048)), 1, DEFAULT_MAX_MODE, DEFAULT_COUNT).unwrap();
    assert_eq!(r.verdict, InequalityVerdict::Equality, "{r:?}");
    assert!((r.lhs - 0.5).abs() < 1e-4 && (r.rhs - 0.5).abs() < 1e-4);
    assert!(spec.to_csv().starts_with("index,mode,lambda,residual\n"));
    assert_eq!(spec.to_csv().lines().count(), DEFAULT_COUNT + 1);

    let (r, _) = verify_eigen_bound(&Shape::Curve(curve("ellipse:2:1", 1024)), 1, DEFAULT_MAX_MODE, DEFAULT_COUNT).unwrap();
    assert_eq!(r.verdict, InequalityVerdict::Holds, "{r:?}");

    let (r, _) = verify_eigen_bound(&Shape::Axisym(surface("sphere:1", 3, 800)), 2, DEFAULT_MAX_MODE, DEFAULT_COUNT).unwrap();
    assert_eq!(r.verdict, InequalityVerdict::Equality, "{r:?}");

    let (r, _) = verify_eigen_bound(&Shape::Axisym(surface("spheroid:1.3:1", 3, 400)), 1, DEFAULT_MAX_MODE, DEFAULT_COUNT).unwrap();
    assert_eq!(r.verdict, InequalityVerdict::Holds, "{r:?}");
}
