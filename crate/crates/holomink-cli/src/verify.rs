//! Golden-dataset verification.
//!
//! Each bundled dataset carries an `expected` block with the values printed
//! for it. Gram tables are compared exactly, round trips and reconstructions
//! at the tolerances stored alongside them.

use std::path::{Path, PathBuf};

use holomink::forward::roundtrip;
use holomink::{Quadratic, Scalar, Sigma};
use nalgebra::Matrix2;
use serde_json::{json, Value};

use crate::commands::{exact_gram, reconstruct, Settings};
use crate::document::{document_from_value, read_value, Document, GramDocument, InputError};
use crate::emit::float;
use crate::exit::Failure;

pub const DATASETS_ENV: &str = "HOLOMINK_DATASETS";

/// Round-trip bounds on Gram entries, det and minors, and on the closure residual.
pub const ROUNDTRIP_GRAM_BOUND: f64 = 1e-9;
pub const ROUNDTRIP_CLOSURE_BOUND: f64 = 1e-12;
pub const MATCH_BOUND: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub dataset: String,
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub bound: f64,
    pub detail: String,
}

impl Check {
    fn new(dataset: &str, name: &str, residual: f64, bound: f64, mismatches: Vec<String>) -> Check {
        let passed = residual <= bound && mismatches.is_empty();
        Check { dataset: dataset.into(), name: name.into(), passed, residual, bound, detail: mismatches.join("; ") }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dataset": self.dataset,
            "check": self.name,
            "passed": self.passed,
            "residual": float(self.residual),
            "bound": float(self.bound),
            "detail": self.detail,
        })
    }
}

/// Explicit directory, then `$HOLOMINK_DATASETS`, then `./datasets`, then the
/// copy next to the source tree.
pub fn datasets_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(DATASETS_ENV) {
        return PathBuf::from(p);
    }
    let local = PathBuf::from("datasets");
    if local.is_dir() {
        return local;
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../datasets")
}

fn field(path: &str, message: &str) -> Failure {
    Failure::Input(InputError::Field { path: path.into(), message: message.into() })
}

fn expected_f64s(e: &Value, key: &str) -> Result<Vec<f64>, Failure> {
    e[key]
        .as_array()
        .and_then(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
        .ok_or_else(|| field(&format!("expected.{key}"), "expected an array of numbers"))
}

fn expected_strs(e: &Value, key: &str) -> Result<Vec<String>, Failure> {
    e[key]
        .as_array()
        .and_then(|a| a.iter().map(|v| v.as_str().map(String::from)).collect::<Option<Vec<_>>>())
        .ok_or_else(|| field(&format!("expected.{key}"), "expected an array of strings"))
}

fn parse_q(s: &str, path: &str) -> Result<Quadratic, Failure> {
    s.parse().map_err(|_| field(path, "not an exact scalar"))
}

/// Runs every dataset in `dir` that carries an `expected` block.
pub fn verify_paper(dir: &Path, s: &Settings) -> Result<Vec<Check>, Failure> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| InputError::Io { path: dir.display().to_string(), message: e.to_string() })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut checks = Vec::new();
    for path in files {
        let v = read_value(&path)?;
        let Some(expected) = v.get("expected") else { continue };
        let label = v["label"]
            .as_str()
            .map(String::from)
            .unwrap_or_else(|| path.file_stem().unwrap_or_default().to_string_lossy().into_owned());
        let doc = document_from_value(&v)?;
        match &doc {
            Document::Gram(g) if expected.get("lifts").is_some() => checks.extend(roundtrip_checks(&label, g, expected, s)?),
            Document::Gram(g) => checks.push(table_check(&label, g, expected, s)?),
            Document::Holonomy(_) => checks.extend(reconstruction_checks(&label, &doc, expected, s)?),
            _ => {}
        }
    }
    Ok(checks)
}

fn table_check(label: &str, g: &GramDocument, e: &Value, s: &Settings) -> Result<Check, Failure> {
    let tol = s.tol();
    let gd = exact_gram(g, &tol)?;
    let mut bad = Vec::new();
    let mut residual = 0.0f64;
    let mut bound = 0.0;
    match &e["det"] {
        Value::String(d) => {
            let want = parse_q(d, "expected.det")?;
            residual = residual.max((gd.det.clone() - want.clone()).to_f64().abs());
            if gd.det != want {
                bad.push(format!("det {} != {want}", gd.det));
            }
        }
        v => {
            let want = v.as_f64().ok_or_else(|| field("expected.det", "expected a number or string"))?;
            bound = e["det_tolerance"].as_f64().unwrap_or(0.0);
            residual = residual.max((gd.det.to_f64() - want).abs());
        }
    }
    for (i, m) in expected_strs(e, "minors")?.iter().enumerate() {
        let want = parse_q(m, "expected.minors")?;
        residual = residual.max((gd.minors[i].clone() - want.clone()).to_f64().abs());
        if gd.minors[i] != want {
            bad.push(format!("minor {} is {} not {want}", i + 1, gd.minors[i]));
        }
    }
    let inertia = |v: &Value| v.as_array().map(|a| a.iter().filter_map(Value::as_u64).map(|x| x as usize).collect::<Vec<_>>());
    let got = [gd.inertia.zeros, gd.inertia.negatives, gd.inertia.positives];
    if inertia(&e["inertia"]).as_deref() != Some(&got[..]) {
        bad.push(format!("inertia {}", gd.inertia));
    }
    if let Some(mis) = e["minor_inertias"].as_array() {
        for (i, m) in mis.iter().enumerate() {
            let mi = &gd.minor_inertias[i];
            if inertia(m).as_deref() != Some(&[mi.zeros, mi.negatives, mi.positives][..]) {
                bad.push(format!("minor inertia {} is {mi}", i + 1));
            }
        }
    }
    let sector = holomink::sectors::classify_sector(&gd, g.sigma, &tol);
    let types: Vec<&str> = sector.vertex_types.iter().map(|t| t.name()).collect();
    if expected_strs(e, "vertex_types")? != types {
        bad.push(format!("vertex types {types:?}"));
    }
    if e["model"].as_str() != Some(sector.model.name()) {
        bad.push(format!("model {}", sector.model.name()));
    }
    Ok(Check::new(label, "exact table", residual, bound, bad))
}

fn lift_rows(v: &Value) -> Option<Vec<Matrix2<f64>>> {
    v.as_array()?
        .iter()
        .map(|m| {
            let r = m.as_array()?;
            let row = |i: usize| -> Option<(f64, f64)> {
                let a = r.get(i)?.as_array()?;
                Some((a.first()?.as_f64()?, a.get(1)?.as_f64()?))
            };
            let ((a, b), (c, d)) = (row(0)?, row(1)?);
            Some(Matrix2::new(a, b, c, d))
        })
        .collect()
}

/// |tr Hᵢ| and |tr HᵢHⱼ|: invariant under conjugation and under the central
/// sign of each lift, so they compare lifts computed in different frames.
pub fn lift_invariants(hs: &[Matrix2<f64>]) -> Vec<f64> {
    let mut out: Vec<f64> = hs.iter().map(|h| h.trace().abs()).collect();
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            out.push((hs[i] * hs[j]).trace().abs());
        }
    }
    out
}

fn roundtrip_checks(label: &str, g: &GramDocument, e: &Value, s: &Settings) -> Result<Vec<Check>, Failure> {
    let tol = s.tol();
    let gd = exact_gram(g, &tol)?;
    let sigma = g.sigma.unwrap_or(Sigma::AntiDeSitter);
    let r = roundtrip(&gd, sigma, &tol)?;
    let gram_res = r.entry_deviation.max(r.det_deviation).max(r.minor_deviation);
    let mut out = vec![
        Check::new(label, "roundtrip Gram", gram_res, ROUNDTRIP_GRAM_BOUND, vec![]),
        Check::new(label, "roundtrip closure", r.closure_residual, ROUNDTRIP_CLOSURE_BOUND, vec![]),
    ];
    let printed = lift_rows(&e["lifts"]).ok_or_else(|| field("expected.lifts", "expected four 2x2 matrices"))?;
    let ours: Vec<Matrix2<f64>> = r.lifts.iter().map(|h| *h.matrix()).collect();
    let (a, b) = (lift_invariants(&printed), lift_invariants(&ours));
    let dev = a.iter().zip(&b).map(|(x, y)| (x - y).abs() / x.abs().max(1.0)).fold(0.0, f64::max);
    let mut bad = Vec::new();
    if let Ok(classes) = expected_strs(e, "classes") {
        let got: Vec<&str> = r.holonomies.iter().map(|o| o.class().name()).collect();
        if classes != got {
            bad.push(format!("classes {got:?}"));
        }
    }
    out.push(Check::new(label, "lift invariants", dev, e["lift_tolerance"].as_f64().unwrap_or(1e-4), bad));
    Ok(out)
}

fn reconstruction_checks(label: &str, doc: &Document, e: &Value, s: &Settings) -> Result<Vec<Check>, Failure> {
    let r = reconstruct(doc, s)?;
    let mut out = Vec::new();
    let mut bad = Vec::new();
    let mut dev = 0.0f64;
    let num = |v: &Value| v.as_f64().unwrap_or(f64::NAN);
    let compare = |key: &str, got: &Value, dev: &mut f64| -> Result<(), Failure> {
        if e.get(key).is_none() {
            return Ok(());
        }
        match &e[key] {
            Value::Array(_) => {
                let want = expected_f64s(e, key)?;
                let got = got.as_array().ok_or_else(|| field(key, "missing from report"))?;
                for (w, g) in want.iter().zip(got) {
                    *dev = dev.max((w - num(g)).abs());
                }
            }
            w => *dev = dev.max((num(w) - num(got)).abs()),
        }
        Ok(())
    };
    if let Some(sig) = e.get("sigma") {
        if sig.as_i64() != r["sigma"].as_i64() {
            bad.push(format!("sigma {}", r["sigma"]));
        }
    }
    if let Some(exact) = r.get("exact") {
        if let Some(det) = e["det"].as_str() {
            let got = exact["gram"]["det"].as_str().unwrap_or("");
            if got != det {
                bad.push(format!("exact det {got}"));
            }
        }
        if let Ok(want) = expected_strs(e, "gram") {
            let m = &exact["gram"]["entries"];
            let mut k = 0;
            for i in 0..4 {
                for j in i..4 {
                    if m[i][j].as_str() != Some(want[k].as_str()) {
                        bad.push(format!("exact G{}{} = {}", i + 1, j + 1, m[i][j]));
                    }
                    k += 1;
                }
            }
        }
        let closure = exact["closure_residual"].as_str().unwrap_or("?");
        if closure != "0" {
            bad.push(format!("exact closure residual {closure}"));
        }
    } else {
        compare("det", &r["gram"]["det"], &mut dev)?;
    }
    compare("chi", &r["chi"], &mut dev)?;
    compare("minors", &r["gram"]["minors"], &mut dev)?;
    compare("supports", &r["tetrahedron"]["supports"], &mut dev)?;
    compare("trace_o4", &r["holonomies"]["traces"][3], &mut dev)?;
    if let Ok(classes) = expected_strs(e, "classes") {
        let got: Vec<String> = expected_strs(&r["holonomies"], "classes")?;
        if classes != got {
            bad.push(format!("classes {got:?}"));
        }
    }
    let tolerance = e["tolerance"].as_f64().unwrap_or(0.0);
    out.push(Check::new(label, "reconstruction", dev, tolerance, bad));
    let m = num(&r["diagnostics"]["max_holonomy_match"]);
    out.push(Check::new(label, "holonomy match", m, MATCH_BOUND, vec![]));
    Ok(out)
}

pub fn summary(checks: &[Check]) -> Value {
    let failed = checks.iter().filter(|c| !c.passed).count();
    json!({
        "command": "verify-paper",
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        "passed": checks.len() - failed,
        "failed": failed,
    })
}

pub fn table(checks: &[Check]) -> String {
    let mut out = String::new();
    let w = checks.iter().map(|c| c.dataset.len()).max().unwrap_or(7).max(7);
    out.push_str(&format!("{:<6} {:<w$}  {:<18} {:>12} {:>10}  detail\n", "status", "dataset", "check", "residual", "bound"));
    for c in checks {
        out.push_str(&format!(
            "{:<6} {:<w$}  {:<18} {:>12.3e} {:>10.0e}  {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.dataset,
            c.name,
            c.residual,
            c.bound,
            c.detail
        ));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    out.push_str(&format!("{} passed, {failed} failed\n", checks.len() - failed));
    out
}
