//! Deterministic rendering of result objects.
//!
//! JSON mode prints every float with exactly 15 significant digits in
//! scientific notation and keeps object keys sorted, so identical inputs
//! produce byte-identical output. Table mode is a human-readable flat
//! listing of the same object.

use serde_json::Value;

/// 15 significant digits, always scientific, always the same bytes for
/// the same value.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.14e}")
    } else {
        // The library never emits these; keep the JSON well-formed anyway.
        format!("\"{x}\"")
    }
}

fn render_number(n: &serde_json::Number) -> String {
    if let Some(i) = n.as_i64() {
        return i.to_string();
    }
    if let Some(u) = n.as_u64() {
        return u.to_string();
    }
    fmt_f64(n.as_f64().unwrap_or(f64::NAN))
}

/// Compact JSON with sorted keys and the fixed float format.
pub fn render_json(value: &Value) -> String {
    match value {
        Value::Null => "null".to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => render_number(n),
        Value::String(s) => serde_json::to_string(s).expect("string encodes"),
        Value::Array(items) => {
            let inner: Vec<String> = items.iter().map(render_json).collect();
            format!("[{}]", inner.join(","))
        }
        Value::Object(map) => {
            // serde_json's default map is a BTreeMap, so iteration is
            // already sorted by key.
            let inner: Vec<String> = map
                .iter()
                .map(|(k, v)| {
                    format!(
                        "{}:{}",
                        serde_json::to_string(k).expect("key encodes"),
                        render_json(v)
                    )
                })
                .collect();
            format!("{{{}}}", inner.join(","))
        }
    }
}

/// One `key = value` line per top-level entry.
pub fn render_table(value: &Value) -> String {
    match value {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| match v {
                Value::Number(n) => format!("{k} = {n}"),
                Value::String(s) => format!("{k} = {s}"),
                Value::Bool(b) => format!("{k} = {b}"),
                other => format!("{k} = {}", render_json(other)),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        other => render_json(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_fifteen_significant_digits() {
        assert_eq!(fmt_f64(1.0), "1.00000000000000e0");
        assert_eq!(fmt_f64(2.0 / 3.0f64.sqrt()), "1.15470053837925e0");
        assert_eq!(fmt_f64(1e-10), "1.00000000000000e-10");
    }

    #[test]
    fn objects_render_sorted_and_compact() {
        let v = json!({"b": 1.0, "a": 2u64, "c": [true, null]});
        assert_eq!(
            render_json(&v),
            r#"{"a":2,"b":1.00000000000000e0,"c":[true,null]}"#
        );
    }
}
