//! Output formatting: every number leaves the tool with 12 significant
//! digits, below the crate's tolerances and above float noise.

use serde_json::Value;

/// Round to 12 significant digits through the decimal representation.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Round every number in a JSON tree in place.
pub fn round_numbers(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(sig12(f)) {
                        *value = Value::Number(rounded);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// Serialize to pretty JSON with rounded numbers.
pub fn to_json_string(value: impl serde::Serialize) -> String {
    let mut v = serde_json::to_value(value).expect("serializable output");
    round_numbers(&mut v);
    serde_json::to_string_pretty(&v).expect("printable output")
}

/// CSV cell for an optional number; absent values print empty.
pub fn csv_num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{}", sig12(v)),
        _ => String::new(),
    }
}

/// Quote a CSV field when it contains a separator, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
