//! Canonical JSON and plain-text rendering.
//!
//! Object keys are sorted, integers print as integers and every other number
//! prints with 17 significant digits, so parsing an emitted document and
//! emitting it again gives the same bytes.

use std::fmt::Write;

use serde_json::{Number, Value};

/// 17 significant digits; enough to round-trip any f64.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    format!("{x:.16e}")
}

pub fn float(x: f64) -> Value {
    Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn format_number(n: &Number) -> String {
    if let Some(i) = n.as_i64() {
        i.to_string()
    } else if let Some(u) = n.as_u64() {
        u.to_string()
    } else {
        format_float(n.as_f64().unwrap_or(f64::NAN))
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) => format_number(n),
        Value::String(s) => Value::String(s.clone()).to_string(),
        other => other.to_string(),
    }
}

pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_json(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_json(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth + 1);
    match v {
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) if a.iter().all(is_scalar) => {
            out.push('[');
            out.push_str(&a.iter().map(scalar).collect::<Vec<_>>().join(", "));
            out.push(']');
        }
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad);
                write_json(x, depth + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(depth));
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_json(&m[*k], depth + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(depth));
            out.push('}');
        }
        s => out.push_str(&scalar(s)),
    }
}

fn text_scalar(v: &Value) -> String {
    match v {
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => i.to_string(),
            (None, Some(x)) => format!("{x:.10}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// `path: value` lines; scalar arrays inline, matrices one row per line.
pub fn text(v: &Value) -> String {
    let mut out = String::new();
    write_text(v, "", &mut out);
    out
}

fn write_text(v: &Value, path: &str, out: &mut String) {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            for k in keys {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                write_text(&m[k], &p, out);
            }
        }
        Value::Array(a) if a.iter().all(is_scalar) => {
            let _ = writeln!(out, "{path}: [{}]", a.iter().map(text_scalar).collect::<Vec<_>>().join(", "));
        }
        Value::Array(a) if a.iter().all(|r| r.as_array().is_some_and(|r| r.iter().all(is_scalar))) => {
            let _ = writeln!(out, "{path}:");
            for r in a {
                let r = r.as_array().expect("checked");
                let _ = writeln!(out, "  [{}]", r.iter().map(text_scalar).collect::<Vec<_>>().join(", "));
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                write_text(x, &format!("{path}[{i}]"), out);
            }
        }
        s => {
            let _ = writeln!(out, "{path}: {}", text_scalar(s));
        }
    }
}
