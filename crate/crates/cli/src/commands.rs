//! The `flow`, `verify`, `eigen` and `sweep` subcommands.

use serde_json::{json, Value};
use warpineq::axisym::{ShapeSpec, DEFAULT_M};
use warpineq::corpus::{axisym_corpus, curve_corpus, ConvexityReq};
use warpineq::curve2d::{CurveSpec, DEFAULT_N};
use warpineq::flowlab::{run, FlowKind, RunResult, Shape, StopReason};
use warpineq::inequalities::{
    example_1_4_suite, flow_limit, verify_3term, verify_afw, verify_minkowski2d, verify_minkowski_h,
    verify_minkowski_s, InequalityReport, InequalityVerdict,
};
use warpineq::spectral::{verify_eigen_bound, DEFAULT_COUNT, DEFAULT_MAX_MODE};
use warpineq::{par, Error, SpaceForm, Weight};

use crate::config::{RunConfig, EIGEN_CURVE_SAMPLES, FLOW_SAMPLES};
use crate::output::{csv, envelope, Sink};
use crate::Usage;

/// Process exit status of a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Violated,
    /// at least one shape of a sweep failed numerically
    Numerical,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Violated => 1,
            Outcome::Numerical => 3,
        }
    }
}

fn flow_kind(cfg: &RunConfig) -> anyhow::Result<FlowKind> {
    cfg.flow_kind()?.ok_or_else(|| Usage::new("no flow given (use --flow)"))
}

fn curve_only(shape: Shape, what: &str) -> anyhow::Result<warpineq::curve2d::ClosedCurve> {
    match shape {
        Shape::Curve(c) => Ok(c),
        Shape::Axisym(_) => Err(Usage::new(format!("{what} needs a curve (n = 2)"))),
    }
}

fn axisym_only(shape: Shape, what: &str) -> anyhow::Result<warpineq::axisym::AxisymShape> {
    match shape {
        Shape::Axisym(s) => Ok(s),
        Shape::Curve(_) => Err(Usage::new(format!("{what} needs a hypersurface (n >= 3)"))),
    }
}

/// Monitor verdicts, stop reason and, at stationarity, the flow-limit
/// comparison.
fn flow_summary(kind: FlowKind, initial: &Shape, res: &RunResult, g: &Weight) -> anyhow::Result<Value> {
    let limit = if res.stop == StopReason::Stationary {
        Some(flow_limit(kind, initial, &res.final_shape, g)?)
    } else {
        None
    };
    Ok(json!({
        "flow": kind.id(),
        "stop": res.stop,
        "steps": res.series.steps(),
        "t_final": res.series.times.last().copied().unwrap_or(0.0),
        "initial_roundness": initial.roundness(),
        "final_roundness": res.final_shape.roundness(),
        "verdicts": res.series.verdicts,
        "pass": res.passed(),
        "limit": limit,
        "truncation": "runs stop at max|F| <= stop_tol * max rho, max_steps, or t_max",
    }))
}

fn limit_ok(summary: &Value) -> bool {
    summary["limit"]["verdict"].as_str().map_or(true, |v| v != "violated")
}

pub fn cmd_flow(cfg: &RunConfig, sink: &Sink) -> anyhow::Result<Outcome> {
    let kind = flow_kind(cfg)?;
    kind.check_compatible(cfg.space_form()?, cfg.dimension()?)?;
    let shape = cfg.build_shape(FLOW_SAMPLES, FLOW_SAMPLES)?;
    let g = cfg.weight()?;
    let spec = cfg.flow_spec(kind)?;
    let res = run(shape.clone(), &spec, &kind.default_monitors(), &g)?;
    let summary = flow_summary(kind, &shape, &res, &g)?;

    sink.text("monitors.csv", &res.series.to_csv())?;
    sink.json("verdict.json", &envelope(cfg, &summary))?;
    sink.json("final_shape.json", &envelope(cfg, &res.final_shape.to_json()))?;

    let t_final = res.series.times.last().copied().unwrap_or(0.0);
    println!("flow {}: {} steps, t = {t_final:.6}, stop = {:?}", kind.id(), res.series.steps(), res.stop);
    for v in &res.series.verdicts {
        println!(
            "  {:<16} {:<14} {}  max_violation = {:.3e}",
            v.monitor,
            v.claim.to_string(),
            if v.pass { "pass" } else { "FAIL" },
            v.max_violation
        );
    }
    if let Some(r) = summary.get("limit").filter(|l| !l.is_null()) {
        println!("  limit: lhs = {} rhs = {} verdict = {}", r["lhs"], r["rhs"], r["verdict"].as_str().unwrap_or(""));
    }
    Ok(if res.passed() && limit_ok(&summary) { Outcome::Pass } else { Outcome::Violated })
}

fn verify_one(cfg: &RunConfig, theorem: &str, shape: Shape, g: &Weight) -> anyhow::Result<InequalityReport> {
    let k = cfg.k.unwrap_or(1);
    Ok(match theorem {
        "afw" => verify_afw(&shape, g, k, cfg.l.unwrap_or(-1))?,
        "minkowski2d" => verify_minkowski2d(&curve_only(shape, theorem)?, g)?,
        "minkowski-h" => verify_minkowski_h(&axisym_only(shape, theorem)?, g)?,
        "minkowski-s" => verify_minkowski_s(&axisym_only(shape, theorem)?, g)?,
        "three-term" => verify_3term(&shape, k)?,
        "eigen-bound" => {
            let max_mode = cfg.max_mode.unwrap_or(DEFAULT_MAX_MODE);
            verify_eigen_bound(&shape, k, max_mode, cfg.eigen_count.unwrap_or(DEFAULT_COUNT))?.0
        }
        other => return Err(Usage::new(format!("unknown theorem `{other}`"))),
    })
}

fn print_report(r: &InequalityReport) {
    let item = r.params.get("item").map(|i| format!("[{i}] ")).unwrap_or_default();
    let weight = r.params.get("weight").and_then(Value::as_str).unwrap_or("-");
    println!(
        "{} {item}{weight}: lhs = {:.12e} rhs = {:.12e} margin = {:.3e} -> {}",
        r.theorem, r.lhs, r.rhs, r.margin, r.verdict
    );
}

pub fn cmd_verify(cfg: &RunConfig, sink: &Sink) -> anyhow::Result<Outcome> {
    let g = cfg.weight()?;
    let reports = match (cfg.suite.as_deref(), cfg.theorem.as_deref()) {
        (Some(_), Some(_)) => return Err(Usage::new("give either --suite or --theorem, not both")),
        (Some("example-1.4"), None) => {
            let curve = curve_only(cfg.build_shape(DEFAULT_N, DEFAULT_M)?, "example-1.4")?;
            example_1_4_suite(cfg.space_form()?, &curve)?
        }
        (Some(other), None) => return Err(Usage::new(format!("unknown suite `{other}`"))),
        (None, Some(t)) => vec![verify_one(cfg, t, cfg.build_shape(DEFAULT_N, DEFAULT_M)?, &g)?],
        (None, None) => return Err(Usage::new("nothing to verify (use --theorem or --suite)")),
    };
    for r in &reports {
        print_report(r);
    }
    sink.json("reports.json", &envelope(cfg, &reports))?;
    Ok(if reports.iter().all(InequalityReport::passed) { Outcome::Pass } else { Outcome::Violated })
}

pub fn cmd_eigen(cfg: &RunConfig, sink: &Sink) -> anyhow::Result<Outcome> {
    let shape = cfg.build_shape(EIGEN_CURVE_SAMPLES, DEFAULT_M)?;
    let k = cfg.k.unwrap_or(1);
    let max_mode = cfg.max_mode.unwrap_or(DEFAULT_MAX_MODE);
    let (report, spectrum) = verify_eigen_bound(&shape, k, max_mode, cfg.eigen_count.unwrap_or(DEFAULT_COUNT))?;
    sink.text("spectrum.csv", &spectrum.to_csv())?;
    sink.json("bound.json", &envelope(cfg, &report))?;
    println!("lambda1 = {:.10}  bound = {:.10}  -> {}", report.rhs, report.lhs, report.verdict);
    for e in &spectrum.entries {
        println!("  {:>3}  mode {:>2}  {:.10}", e.index, e.mode, e.lambda);
    }
    Ok(if report.passed() { Outcome::Pass } else { Outcome::Violated })
}

/// Compact, re-parsable spelling of a generated shape.
fn label_curve(spec: &CurveSpec) -> String {
    match spec {
        CurveSpec::RadialFourier { a0, cos, sin } => {
            let mut s = format!("fourier:{a0}");
            for (c, d) in cos.iter().zip(sin) {
                s.push_str(&format!(":{c}:{d}"));
            }
            s
        }
        other => format!("{other:?}"),
    }
}

fn label_axisym(spec: &ShapeSpec) -> String {
    match spec {
        ShapeSpec::Legendre { a0, coeffs } => {
            let mut s = format!("legendre:{a0}");
            for c in coeffs {
                s.push_str(&format!(":{c}"));
            }
            s
        }
        other => format!("{other:?}"),
    }
}

/// Corpus shapes with their labels.
fn corpus(cfg: &RunConfig, space: SpaceForm, n: usize, req: ConvexityReq) -> anyhow::Result<Vec<(String, Shape)>> {
    let spec = cfg.corpus();
    let samples = cfg.samples.expect("defaults resolved");
    Ok(if n == 2 {
        curve_corpus(space, &spec, samples)?.into_iter().map(|(s, c)| (label_curve(&s), Shape::Curve(c))).collect()
    } else {
        axisym_corpus(space, n, req, &spec, samples)?
            .into_iter()
            .map(|(s, a)| (label_axisym(&s), Shape::Axisym(a)))
            .collect()
    })
}

fn field(e: &Error) -> String {
    e.to_string().replace([',', '\n'], ";")
}

pub fn cmd_sweep(cfg: &RunConfig, sink: &Sink) -> anyhow::Result<Outcome> {
    let space = cfg.space_form()?;
    let n = cfg.dimension()?;
    let g = cfg.weight()?;
    match (cfg.theorem.as_deref(), cfg.flow_kind()?) {
        (Some(_), Some(_)) => Err(Usage::new("give either --theorem or --flow, not both")),
        (None, None) => Err(Usage::new("nothing to sweep (use --theorem or --flow)")),
        (Some(theorem), None) => {
            let k = cfg.k.unwrap_or(1);
            let req = match theorem {
                "minkowski-h" => ConvexityReq::HConvex,
                "minkowski-s" | "minkowski2d" => ConvexityReq::Convex,
                "afw" | "three-term" | "eigen-bound" => ConvexityReq::KConvex(k),
                other => return Err(Usage::new(format!("unknown theorem `{other}`"))),
            };
            let shapes = corpus(cfg, space, n, req)?;
            let results = par::map_slice(&shapes, |(_, s)| verify_one(cfg, theorem, s.clone(), &g));
            let mut rows = Vec::new();
            let mut reports = Vec::new();
            let (mut held, mut violated, mut errors) = (0, 0, 0);
            for (i, ((label, _), r)) in shapes.iter().zip(results).enumerate() {
                match r {
                    Ok(r) => {
                        if r.verdict == InequalityVerdict::Violated {
                            violated += 1;
                        } else {
                            held += 1;
                        }
                        rows.push(vec![
                            i.to_string(),
                            label.clone(),
                            r.verdict.to_string(),
                            format!("{:e}", r.lhs),
                            format!("{:e}", r.rhs),
                            format!("{:e}", r.margin),
                            format!("{:e}", r.relative_margin()),
                        ]);
                        reports.push(json!(r));
                    }
                    Err(e) => {
                        // usage errors are the same for every shape
                        if let Some(u) = e.downcast_ref::<Usage>() {
                            return Err(Usage::new(u.to_string()));
                        }
                        errors += 1;
                        let msg = e.downcast_ref::<Error>().map(field).unwrap_or_else(|| e.to_string());
                        rows.push(vec![i.to_string(), label.clone(), format!("error: {msg}"), String::new(), String::new(), String::new(), String::new()]);
                        reports.push(json!({"error": e.to_string()}));
                    }
                }
            }
            let total = shapes.len();
            sink.text("sweep.csv", &csv(&["index", "shape", "verdict", "lhs", "rhs", "margin", "relative_margin"], &rows))?;
            let summary = json!({"theorem": theorem, "total": total, "holds": held, "violated": violated, "errors": errors, "reports": reports});
            sink.json("summary.json", &envelope(cfg, &summary))?;
            println!("{theorem}: {held}/{total} holds ({violated} violated, {errors} errors)");
            Ok(tally(violated, errors))
        }
        (None, Some(kind)) => {
            kind.check_compatible(space, n)?;
            let req = match kind {
                FlowKind::ImcfK { k } => ConvexityReq::KConvex(k),
                FlowKind::HypMean => ConvexityReq::HConvex,
                FlowKind::CurveLp | FlowKind::SphMean => ConvexityReq::Convex,
            };
            let spec = cfg.flow_spec(kind)?;
            let shapes = corpus(cfg, space, n, req)?;
            let results = par::map_slice(&shapes, |(_, s)| -> anyhow::Result<Value> {
                let res = run(s.clone(), &spec, &kind.default_monitors(), &g)?;
                flow_summary(kind, s, &res, &g)
            });
            let mut rows = Vec::new();
            let mut runs = Vec::new();
            let (mut passed, mut failed, mut errors) = (0, 0, 0);
            for (i, ((label, _), r)) in shapes.iter().zip(results).enumerate() {
                match r {
                    Ok(v) => {
                        let ok = v["pass"].as_bool() == Some(true) && limit_ok(&v);
                        if ok {
                            passed += 1;
                        } else {
                            failed += 1;
                        }
                        let failing: Vec<&str> = v["verdicts"]
                            .as_array()
                            .into_iter()
                            .flatten()
                            .filter(|m| m["pass"].as_bool() != Some(true))
                            .filter_map(|m| m["monitor"].as_str())
                            .collect();
                        rows.push(vec![
                            i.to_string(),
                            label.clone(),
                            v["stop"].as_str().unwrap_or("").to_string(),
                            v["steps"].to_string(),
                            format!("{:e}", v["final_roundness"].as_f64().unwrap_or(f64::NAN)),
                            v["limit"]["verdict"].as_str().unwrap_or("-").to_string(),
                            if ok { "pass".into() } else { format!("fail: {}", failing.join(";")) },
                        ]);
                        runs.push(v);
                    }
                    Err(e) => {
                        errors += 1;
                        let msg = e.downcast_ref::<Error>().map(field).unwrap_or_else(|| e.to_string());
                        rows.push(vec![i.to_string(), label.clone(), String::new(), String::new(), String::new(), String::new(), format!("error: {msg}")]);
                        runs.push(json!({"error": e.to_string()}));
                    }
                }
            }
            let total = shapes.len();
            sink.text("sweep.csv", &csv(&["index", "shape", "stop", "steps", "final_roundness", "limit", "monotonicity"], &rows))?;
            let summary = json!({"flow": kind.id(), "total": total, "pass": passed, "fail": failed, "errors": errors, "runs": runs});
            sink.json("summary.json", &envelope(cfg, &summary))?;
            println!("{}: {passed}/{total} pass ({failed} fail, {errors} errors)", kind.id());
            Ok(tally(failed, errors))
        }
    }
}

fn tally(violated: usize, errors: usize) -> Outcome {
    if violated > 0 {
        Outcome::Violated
    } else if errors > 0 {
        Outcome::Numerical
    } else {
        Outcome::Pass
    }
}
