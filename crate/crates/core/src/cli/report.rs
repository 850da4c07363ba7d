use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::Value;

use super::{read_text, CliError, Manifest};

fn mark(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn num(v: &Value, key: &str) -> Option<f64> {
    v.get(key).and_then(Value::as_f64)
}

/// Checks with tolerances that a summary can be judged against.
fn verdicts(manifest: &Manifest, s: &Value) -> Vec<String> {
    let cfg = &manifest.config;
    let mut out = Vec::new();
    match manifest.subcommand.as_str() {
        "classify" => {
            let basis = s.get("kernel_basis").map(Value::to_string).unwrap_or_default();
            out.push(format!("| case | kernel dimension | basis |\n|---|---|---|\n| {} | {} | `{}` |", s["case"], s["kernel_dimension"], basis));
        }
        "rotset" => {
            let verts = s.get("hull_vertices").and_then(Value::as_array).map_or(0, Vec::len);
            out.push(format!("hull vertices: {verts}; shape: `{}`", s["shape"]));
            let shrinking = s["diameter_trend"].as_array().is_some_and(|t| {
                let d: Vec<f64> = t.iter().filter_map(|p| p[1].as_f64()).collect();
                d.windows(2).all(|w| w[1] <= w[0] + 1e-3)
            });
            out.push(format!("diameter trend nonincreasing (slack 1e-3): {}", mark(shrinking)));
        }
        "franks" => {
            if let (Some(r), Some(t)) = (num(s, "residual_sup"), num(cfg, "tol")) {
                out.push(format!("residual {r:e} below tolerance {t:e}: {}", mark(r < t)));
            }
        }
        "pingpong" => {
            if let Some(m) = num(s, "min_separation") {
                out.push(format!("min separation {m:e} > 0: {}", mark(m > 0.0)));
            }
        }
        "lyapunov" => {
            if let Some(e) = s.get("entropy").filter(|e| !e.is_null()) {
                out.push(format!("entropy inequality log|λ_A| = {} ≥ λ₁ = {}: {}", e["lhs"], e["rhs"], mark(e["holds"] == Value::Bool(true))));
            }
        }
        "splitting" => {
            if let Some(d) = num(s, "defect") {
                out.push(format!("splitting defect {d:e} below 1e-8: {}", mark(d < 1e-8)));
            }
        }
        "faithful" => {
            let r = &s["report"];
            out.push(format!("faithful: {}; obstruction: {}; orbit size: {}", r["faithful"], r["obstruction"], r["orbit_size"]));
        }
        "transversality" => out.push(format!("classification: `{}`", s["classification"])),
        "srb-average" => {
            if let Some(w) = num(s, "total_weight") {
                out.push(format!("weights sum to one (1e-12): {}", mark((w - 1.0).abs() < 1e-12)));
            }
        }
        "scans" => out.push(format!("K = {}; growth flagged: {}", s["K"], s["growing"])),
        _ => {}
    }
    out
}

fn page(dir: &Path) -> Result<String, CliError> {
    let manifest: Manifest = serde_json::from_str(&read_text(&dir.join("manifest.json"))?).map_err(CliError::config)?;
    let mut text = String::new();
    let _ = writeln!(text, "## {} ({})\n", manifest.subcommand, dir.display());
    let _ = writeln!(text, "status: {}; seed: {}; version: {}\n", manifest.status, manifest.seed, manifest.version);
    let summary = dir.join("summary.json");
    if summary.exists() {
        let s: Value = serde_json::from_str(&read_text(&summary)?).map_err(CliError::config)?;
        for v in verdicts(&manifest, &s) {
            let _ = writeln!(text, "{v}\n");
        }
        if let Value::Object(map) = &s {
            let _ = writeln!(text, "| field | value |\n|---|---|");
            for (k, v) in map {
                let shown = if v.is_number() || v.is_boolean() || v.is_string() { v.to_string() } else { "(structured)".into() };
                let _ = writeln!(text, "| {k} | {shown} |");
            }
            text.push('\n');
        }
    }
    if dir.join("error.json").exists() {
        let _ = writeln!(text, "error: `{}`\n", read_text(&dir.join("error.json"))?.trim());
    }
    let _ = writeln!(text, "artifacts:");
    for o in &manifest.outputs {
        let _ = writeln!(text, "- {} ({})", o.file, o.kind);
    }
    text.push('\n');
    Ok(text)
}

/// One section for a run directory, or one per child run directory.
pub fn render_report(dir: &Path) -> Result<String, CliError> {
    let mut text = String::from("# abc run report\n\n");
    if dir.join("manifest.json").exists() {
        text.push_str(&page(dir)?);
        return Ok(text);
    }
    let mut children: Vec<_> = fs::read_dir(dir)
        .map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.join("manifest.json").exists())
        .collect();
    if children.is_empty() {
        return Err(CliError::Config(format!("MissingManifest: no manifest.json under {}", dir.display())));
    }
    children.sort();
    for c in children {
        text.push_str(&page(&c)?);
    }
    Ok(text)
}
