use std::f64::consts::PI;

use approx::assert_relative_eq;

use super::*;
use crate::axisym::ShapeSpec;
use crate::curve2d::CurveSpec;

fn w(id: &str) -> Weight {
    Weight::parse(id).unwrap()
}

fn curve(spec: &str, k: i32, n: usize) -> Shape {
    Shape::Curve(CurveSpec::parse(spec).unwrap().build(SpaceForm::new(k).unwrap(), n).unwrap())
}

fn surface(spec: &str, k: i32, n: usize, m: usize) -> Shape {
    Shape::Axisym(ShapeSpec::parse(spec).unwrap().build(SpaceForm::new(k).unwrap(), n, m).unwrap())
}

#[test]
fn centred_circle_is_a_fixed_point() {
    for k in [-1, 0, 1] {
        let s = curve("circle:1.2", k, 64);
        let next = step(&s, &FlowSpec::new(FlowKind::CurveLp)).unwrap().shape;
        let diff = s.rho().iter().zip(next.rho()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-14, "K={k}: {diff}");
    }
}

#[test]
fn centred_spheres_are_fixed_points() {
    let cases = [
        (FlowKind::ImcfK { k: 1 }, 0),
        (FlowKind::ImcfK { k: 2 }, 0),
        (FlowKind::HypMean, -1),
        (FlowKind::SphMean, 1),
    ];
    for (kind, k) in cases {
        let s = surface("sphere:0.9", k, 3, 64);
        let v = velocity(&s, kind).unwrap();
        assert!(v.max_speed() < 1e-9, "{kind}: {}", v.max_speed());
    }
}

#[test]
fn flow_space_pairing_is_enforced() {
    let g = w("monomial:1");
    let s = surface("sphere:0.9", 1, 3, 32);
    let err = run(s, &FlowSpec::new(FlowKind::HypMean), &[], &g).unwrap_err();
    assert!(matches!(err, Error::InvalidArgument(_)));
    assert!(FlowKind::CurveLp.check_compatible(SpaceForm::EUCLIDEAN, 3).is_err());
    assert!(FlowKind::ImcfK { k: 1 }.check_compatible(SpaceForm::HYPERBOLIC, 3).is_err());
    assert!(FlowKind::ImcfK { k: 3 }.check_compatible(SpaceForm::EUCLIDEAN, 3).is_err());
    assert!(FlowKind::SphMean.check_compatible(SpaceForm::SPHERE, 3).is_ok());
    assert_eq!(FlowKind::parse("imcf-k:2", None).unwrap(), FlowKind::ImcfK { k: 2 });
    assert!(FlowKind::parse("mcf", None).is_err());
}

#[test]
fn monitor_value_examples() {
    let x = w("monomial:1");
    let s = curve("circle:2", 0, 64);
    let geom = s.geometry().unwrap();
    assert_relative_eq!(monitor_value(&s, &geom, MonitorId::Weighted2d, &x).unwrap(), 8.0 * PI, max_relative = 1e-12);

    let r0: f64 = 0.7;
    let s = surface(&format!("sphere:{r0}"), 1, 3, 200);
    let geom = s.geometry().unwrap();
    let zeta = 4.0 * PI * r0.sin().powi(3) / 3.0;
    assert_relative_eq!(monitor_value(&s, &geom, MonitorId::SphPhiVol, &x).unwrap(), zeta, max_relative = 1e-8);

    let one = w("constant:1");
    let s = surface("legendre:1:0.05:0.05", 0, 3, 200);
    let geom = s.geometry().unwrap();
    let a = monitor_value(&s, &geom, MonitorId::WeightedRn(2), &one).unwrap();
    let b = monitor_value(&s, &geom, MonitorId::Quermass(2), &one).unwrap();
    assert_relative_eq!(a, b, max_relative = 1e-14);
    assert!(monitor_value(&s, &geom, MonitorId::Length, &one).is_err());
}

#[test]
fn monitor_ids_round_trip() {
    for id in [
        MonitorId::Length,
        MonitorId::Area,
        MonitorId::Volume,
        MonitorId::Quermass(-1),
        MonitorId::Quermass(2),
        MonitorId::Weighted2d,
        MonitorId::WeightedRn(2),
        MonitorId::WeightedH,
        MonitorId::SphPhiVol,
        MonitorId::IsoDefect,
    ] {
        assert_eq!(id.to_string().parse::<MonitorId>().unwrap(), id);
    }
    let r = MonitorRequest::parse("W_0@nondecreasing").unwrap();
    assert_eq!(r, MonitorRequest::new(MonitorId::Quermass(0), Claim::Nondecreasing));
    assert!(MonitorRequest::parse("W_x").is_err());
}

#[test]
fn heintze_karcher_gap_examples() {
    for k in [-1, 0, 1] {
        let s = surface("sphere:0.8", k, 3, 100);
        assert!(heintze_karcher_gap(&s.geometry().unwrap()).unwrap().abs() < 1e-10);
    }
    let s = surface("offset_sphere:1:0.3", 0, 3, 400);
    assert!(heintze_karcher_gap(&s.geometry().unwrap()).unwrap().abs() < 1e-6);
    let s = surface("spheroid:1.3:1", 0, 3, 400);
    assert!(heintze_karcher_gap(&s.geometry().unwrap()).unwrap() > 1e-3);
    let s = curve("ellipse:1.3:1", 0, 128);
    assert!(heintze_karcher_gap(&s.geometry().unwrap()).unwrap() > 1e-3);
}

/// Takes two steps of exactly `dt` and compares the centred difference of
/// each monitor with its analytic derivative at the middle state.
fn time_fd_error(shape: &Shape, kind: FlowKind, id: MonitorId, g: &Weight, dt: f64) -> f64 {
    let spec = FlowSpec::new(kind).with_dt(dt);
    let s0 = shape.clone();
    let r1 = step(&s0, &spec).unwrap();
    assert_eq!(r1.dt, dt, "dt is above the stability bound");
    let s1 = r1.shape;
    let r2 = step(&s1, &spec).unwrap();
    let s2 = r2.shape;
    let value = |s: &Shape| monitor_value(s, &s.geometry().unwrap(), id, g).unwrap();
    let fd = (value(&s2) - value(&s0)) / (2.0 * dt);
    let rhs = monitor_rhs(&s1, &r2.start.geometry, id, g, &r2.start.normal).unwrap();
    ((fd - rhs) / rhs.abs().max(1e-300)).abs()
}

#[test]
fn curve_evolution_matches_time_difference() {
    let shape = curve("fourier:1:0:0:0.1", 0, 64);
    let x = w("monomial:1");
    let coarse = time_fd_error(&shape, FlowKind::CurveLp, MonitorId::Weighted2d, &x, 1e-4);
    let fine = time_fd_error(&shape, FlowKind::CurveLp, MonitorId::Weighted2d, &x, 5e-5);
    assert!(coarse < 1e-3, "{coarse}");
    assert!(fine < coarse / 2.0, "{coarse} -> {fine}");
    for k in [-1, 1] {
        let shape = curve("fourier:0.8:0.05:0.02:0.06", k, 64);
        for g in ["exp", "monomial:2", "constant:1"] {
            let e = time_fd_error(&shape, FlowKind::CurveLp, MonitorId::Weighted2d, &w(g), 1e-4);
            if g != "constant:1" {
                assert!(e < 1e-3, "K={k} {g}: {e}");
            }
        }
        let e = time_fd_error(&shape, FlowKind::CurveLp, MonitorId::Area, &w("constant:1"), 1e-4);
        assert!(e < 1e-3, "K={k} area: {e}");
    }
}

#[test]
fn hypersurface_evolution_matches_time_difference() {
    let cases: [(&str, i32, FlowKind, MonitorId, &str); 7] = [
        ("legendre:1:0.08:0.05", 0, FlowKind::ImcfK { k: 1 }, MonitorId::WeightedRn(1), "monomial:2"),
        ("legendre:1:0.08:0.05", 0, FlowKind::ImcfK { k: 2 }, MonitorId::WeightedRn(2), "exp"),
        ("legendre:1:0.08:0.05", 0, FlowKind::ImcfK { k: 2 }, MonitorId::Quermass(0), "constant:1"),
        ("legendre:1:0.08:0.05", 0, FlowKind::ImcfK { k: 1 }, MonitorId::Volume, "constant:1"),
        ("legendre:0.8:0.03:0.02", -1, FlowKind::HypMean, MonitorId::WeightedH, "cosh"),
        ("legendre:0.8:0.05:0.03", 1, FlowKind::SphMean, MonitorId::WeightedH, "monomial:2"),
        ("legendre:0.8:0.05:0.03", 1, FlowKind::SphMean, MonitorId::SphPhiVol, "constant:1"),
    ];
    // The discrete monitors differ from the continuum ones by O(h⁴), which
    // floors the comparison; dt and h are refined together.
    for (spec, k, kind, id, g) in cases {
        let coarse = time_fd_error(&surface(spec, k, 3, 64), kind, id, &w(g), 1e-4);
        let fine = time_fd_error(&surface(spec, k, 3, 128), kind, id, &w(g), 5e-5);
        assert!(coarse < 1e-3, "{kind} {id}: {coarse}");
        assert!(fine < coarse / 2.0, "{kind} {id}: {coarse} -> {fine}");
    }
}

#[test]
fn short_curve_run_respects_claims() {
    let shape = curve("fourier:1:0:0:0.1", 0, 64);
    let spec = FlowSpec::new(FlowKind::CurveLp).with_t_max(1.0);
    let monitors = FlowKind::CurveLp.default_monitors();
    let res = run(shape, &spec, &monitors, &w("monomial:1")).unwrap();
    assert_eq!(res.stop, StopReason::TimeLimit);
    assert!(res.passed(), "{:?}", res.series.verdicts);
    let len = res.series.get(MonitorId::Length).unwrap();
    let drift = ((len[len.len() - 1] - len[0]) / len[0]).abs();
    assert!(drift < 1e-5, "{drift}");
    let csv = res.series.to_csv();
    assert!(csv.starts_with("step,t,maxF,length,weighted2d\n"));
    assert_eq!(csv.lines().count(), res.series.times.len() + 1);
}

#[test]
fn convexity_loss_is_an_error() {
    // strongly non-convex starting curve
    let s = curve("fourier:1:0:0:0:0:0:0:0.3", 0, 64);
    let err = run(s, &FlowSpec::new(FlowKind::CurveLp), &[], &w("monomial:1")).unwrap_err();
    assert!(err.is_numerical(), "{err}");
}

#[test]
fn verdicts_flag_violations() {
    let mut s = MonitorSeries::new(&[
        MonitorRequest::new(MonitorId::Length, Claim::Constant),
        MonitorRequest::new(MonitorId::Area, Claim::Nonincreasing),
        MonitorRequest::new(MonitorId::Volume, Claim::Nondecreasing),
    ]);
    s.push(0.0, 1.0, vec![1.0, 1.0, 1.0]);
    s.push(0.1, 1.0, vec![1.0 + 1e-9, 1.0 + 1e-3, 1.0 + 1e-3]);
    s.finish(1e-7);
    assert!(s.verdicts[0].pass);
    assert!(!s.verdicts[1].pass);
    assert!(s.verdicts[2].pass);
    assert!((s.verdicts[1].max_violation - 1e-3 / (1.0 + 1e-3)).abs() < 1e-12);
}
