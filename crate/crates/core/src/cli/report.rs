//! Report rendering: 12 significant digits, fixed key order.

use serde_json::{Map, Number, Value};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Rounds every non-integer number in `v`; non-finite values become null.
pub fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            *v = Number::from_f64(round_sig(x)).map(Value::Number).unwrap_or(Value::Null);
        }
        Value::Array(a) => a.iter_mut().for_each(round_numbers),
        Value::Object(m) => m.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) if a.iter().all(is_scalar) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            out.push((prefix.to_string(), format!("[{}]", items.join(", "))));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

/// One `key: value` line per leaf; nested keys are joined with dots.
pub fn render_text(report: &Map<String, Value>) -> String {
    let mut s = String::new();
    for (k, v) in report {
        match v {
            Value::Array(a) if a.is_empty() => s.push_str(&format!("{k}: none\n")),
            Value::Array(a) if a.iter().all(is_scalar) => {
                let items: Vec<String> = a.iter().map(scalar).collect();
                s.push_str(&format!("{k}: {}\n", items.join(" ")));
            }
            Value::Object(_) | Value::Array(_) if k != "document" => {
                let mut lines = Vec::new();
                flatten("", v, &mut lines);
                s.push_str(&format!("{k}:\n"));
                for (lk, lv) in lines {
                    s.push_str(&format!("  {lk}: {lv}\n"));
                }
            }
            Value::Object(_) => s.push_str(&format!("{k}: {}\n", serde_json::to_string(v).expect("json"))),
            other => s.push_str(&format!("{k}: {}\n", scalar(other))),
        }
    }
    s
}

pub fn render_json(report: &Map<String, Value>) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("json");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.999_999_999_999_87), 1.0);
        assert_eq!(round_sig(1.234_567_890_123_456), 1.234_567_890_12);
        assert_eq!(round_sig(-0.0), 0.0);
        assert_eq!(round_sig(3.2e-10), 3.2e-10);
        let mut v = serde_json::json!({"a": [0.1 + 0.2, 3], "b": {"c": 2.000_000_000_000_4}});
        round_numbers(&mut v);
        assert_eq!(v.to_string(), r#"{"a":[0.3,3],"b":{"c":2.0}}"#);
    }

    #[test]
    fn text_flattens_nested_results() {
        let v = serde_json::json!({"command": ["pptkit", "demo"], "status": "ok", "results": {"value": 1.0, "zero": {"gap": 1e-9}, "probes": [{"m": 1}], "dims": [2, 2]}});
        let t = render_text(v.as_object().unwrap());
        assert_eq!(t, "command: pptkit demo\nstatus: ok\nresults:\n  value: 1.0\n  zero.gap: 1e-9\n  probes[0].m: 1\n  dims: [2, 2]\n");
    }
}
