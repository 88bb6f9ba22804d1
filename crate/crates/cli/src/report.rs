//! JSON report assembly and atomic file output.
//!
//! Every report document has the shape `{"report": ..., "meta": ...}`;
//! everything nondeterministic (timestamps, wall times) lives under
//! `"meta"`, so byte comparison of the `"report"` subtree is a valid
//! reproducibility check.

use std::path::Path;

use anyhow::{Context, Result};
use polyhom::algebra::system_to_json;
use polyhom::experiments::{ExperimentRun, TrialRow};
use polyhom::solvers::{SolveReport, ZeroSet};
use polyhom::{C64, ProjPoint};
use serde_json::{json, Value};

pub fn point_value(p: &ProjPoint) -> Value {
    coords_value(p.rep())
}

pub fn coords_value(coords: &[C64]) -> Value {
    Value::Array(
        coords
            .iter()
            .map(|c| json!({"re": c.re, "im": c.im}))
            .collect(),
    )
}

fn meta_value(wall_ms: f64) -> Value {
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    json!({"timestamp": timestamp, "wall_ms": wall_ms})
}

pub fn document(report: Value, wall_ms: f64) -> Value {
    json!({"report": report, "meta": meta_value(wall_ms)})
}

pub fn solve_document(report: &SolveReport) -> Value {
    let inner = json!({
        "algorithm": format!("{:?}", report.algorithm),
        "input_hash": report.input_hash,
        "status": format!("{:?}", report.result.status),
        "certified": report.result.certified,
        "steps": report.result.steps,
        "condition_length": report.result.condition_length,
        "mu_peak": report.result.mu_peak,
        "max_jump": report.result.max_jump,
        "zero": point_value(&report.result.final_point),
        "start_zero": point_value(&report.start_zero),
        "start_system": serde_json::from_str::<Value>(&system_to_json(&report.start_system))
            .expect("system json is valid"),
        "seed": report.seed.map(|s| json!({"seed": s.seed, "stream": s.stream})),
    });
    document(inner, report.wall_ms)
}

pub fn zeros_document(input_hash: &str, set: &ZeroSet, wall_ms: f64) -> Value {
    let inner = json!({
        "input_hash": input_hash,
        "count": set.zeros.len(),
        "complete": set.complete,
        "collisions": set.collisions,
        "zeros": set.zeros.iter().map(point_value).collect::<Vec<_>>(),
        "failures": set
            .failures
            .iter()
            .map(|(idx, status)| json!({"path": idx, "status": format!("{status:?}")}))
            .collect::<Vec<_>>(),
    });
    document(inner, wall_ms)
}

pub fn experiment_document(run: &ExperimentRun) -> Value {
    let inner = serde_json::to_value(&run.report).expect("report serializes");
    document(inner, run.report.wall_ms)
}

/// Write atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp-{}",
            path.file_name().and_then(|n| n.to_str()).unwrap_or("out"),
            std::process::id()
        )),
        None => std::path::PathBuf::from(format!(".out.tmp-{}", std::process::id())),
    };
    std::fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn emit(path: Option<&Path>, doc: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(doc).expect("document serializes");
    match path {
        Some(p) => write_atomic(p, &text)?,
        None => println!("{text}"),
    }
    Ok(())
}

/// One row per trial: `trial, kept, value, <aux_label>`.
pub fn write_trials_csv(path: &Path, rows: &[TrialRow], aux_label: &str) -> Result<()> {
    let mut out = String::new();
    if aux_label.is_empty() {
        out.push_str("trial,kept,value\n");
        for r in rows {
            out.push_str(&format!("{},{},{}\n", r.trial, r.kept, r.value));
        }
    } else {
        out.push_str(&format!("trial,kept,value,{aux_label}\n"));
        for r in rows {
            out.push_str(&format!("{},{},{},{}\n", r.trial, r.kept, r.value, r.aux));
        }
    }
    write_atomic(path, &out)
}

/// Tracker trace rows: `s, t, mu, mu_frobenius, delta_s, residual`.
pub fn write_trace_csv(path: &Path, trace: &[polyhom::homotopy::TraceRow]) -> Result<()> {
    let mut out = String::from("s,t,mu,mu_frobenius,delta_s,residual\n");
    for row in trace {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.s, row.t, row.mu, row.mu_frobenius, row.delta_s, row.residual
        ));
    }
    write_atomic(path, &out)
}
