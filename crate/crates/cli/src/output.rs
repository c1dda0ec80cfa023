//! Report envelopes and artifact files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use warpineq::flowlab::{DRIFT_TOL, STOP_TOL};
use warpineq::inequalities::{TOL_AXISYM, TOL_CURVE};

use crate::config::RunConfig;
use crate::Usage;

pub const TOOL: &str = "warpineq";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Wraps command results with the tool version, config and digest, and
/// the tolerances in force.
pub fn envelope<T: Serialize>(cfg: &RunConfig, results: &T) -> Value {
    json!({
        "tool": TOOL,
        "version": VERSION,
        "command": cfg.command,
        "config_digest": cfg.digest(),
        "config": cfg,
        "tolerances": {
            "equality_curve": TOL_CURVE,
            "equality_axisym": TOL_AXISYM,
            "drift": cfg.drift_tol.unwrap_or(DRIFT_TOL),
            "stop": cfg.stop_tol.unwrap_or(STOP_TOL),
        },
        "results": results,
    })
}

/// Writes artifacts into `--out DIR` when one is given.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<&Path>) -> anyhow::Result<Sink> {
        if let Some(d) = dir {
            fs::create_dir_all(d).map_err(|e| Usage::new(format!("cannot create {}: {e}", d.display())))?;
        }
        Ok(Sink { dir: dir.map(Path::to_path_buf) })
    }

    pub fn text(&self, name: &str, contents: &str) -> anyhow::Result<()> {
        if let Some(d) = &self.dir {
            let path = d.join(name);
            fs::write(&path, contents).map_err(|e| Usage::new(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    }

    pub fn json(&self, name: &str, value: &Value) -> anyhow::Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.text(name, &s)
    }
}

/// Writes rows as CSV with a header; fields are written verbatim.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}
