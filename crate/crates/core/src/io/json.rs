//! Deterministic JSON writer.
//!
//! Keys come out sorted (serde_json maps are ordered) and every float is
//! written in scientific notation with 17 significant digits, so equal
//! values always produce equal bytes and parse back exactly.

use std::fmt::Write;

use serde_json::Value;

/// Pretty-printed canonical JSON followed by a newline.
pub fn to_canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    format!("{x:.16e}")
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, v: &Value, level: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        // Short numeric rows stay on one line.
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, level);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(out, level + 1);
                write_value(out, item, level + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                indent(out, level + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, level + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_digits_and_round_trip() {
        let x = 0.1_f64 + 0.2;
        let s = format_float(x);
        assert_eq!(s.split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(f64::NAN), "null");
    }

    #[test]
    fn keys_sorted_and_integers_untouched() {
        let v = json!({"b": 1, "a": [1.5, 2], "c": {"z": true, "y": null}});
        let s = to_canonical_json(&v);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.contains("[1.5000000000000000e0, 2]"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
