//! Number formatting shared by the JSON and CSV writers.
//!
//! All emitted reals carry at most 15 significant digits so that reruns are
//! byte-identical and diffs stay readable.

use serde_json::Value;

/// Rounds to 15 significant decimal digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Shortest decimal form of `round_sig(x)`; non-finite values print as `NaN`/`inf`.
pub fn fmt_sig(x: f64) -> String {
    let r = round_sig(x);
    if r.is_finite() {
        serde_json::to_string(&r).unwrap_or_else(|_| r.to_string())
    } else {
        r.to_string()
    }
}

/// Rounds every float inside a JSON value in place.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(x) = n.as_f64() {
                    if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                        *n = r;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Serializes to a single JSON line with rounded numbers.
pub fn to_json_line<T: serde::Serialize>(item: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(item)?;
    round_json(&mut v);
    serde_json::to_string(&v)
}
