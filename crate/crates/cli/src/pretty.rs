use serde_json::Value;

/// Flatten a report into `path  value` lines with the values aligned.
pub fn render(report: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", report, &mut rows);
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn flatten(path: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&join(k), x, rows);
            }
        }
        Value::Array(xs) if xs.iter().all(is_scalar) => rows.push((path.to_string(), v.to_string())),
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&format!("{path}[{i}]"), x, rows);
            }
        }
        Value::String(s) => rows.push((path.to_string(), s.clone())),
        _ => rows.push((path.to_string(), v.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn nested_paths_align() {
        let out = render(&json!({ "a": { "bb": 1 }, "c": [[1, 2], "x"] }));
        assert_eq!(out, "a.bb  1\nc[0]  [1,2]\nc[1]  x");
    }
}
