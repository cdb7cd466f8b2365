use serde_json::Value;

/// Indented `key: value` lines; scalar arrays stay on one line.
pub fn text(v: &Value) -> String {
    let mut out = Vec::new();
    walk(v, 0, None, &mut out);
    out.join("\n")
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = a.iter().filter_map(scalar).collect();
            Some(format!("[{}]", parts.join(", ")))
        }
        _ => None,
    }
}

fn walk(v: &Value, depth: usize, key: Option<&str>, out: &mut Vec<String>) {
    let pad = "  ".repeat(depth);
    let label = key.map(|k| format!("{k}: ")).unwrap_or_default();
    if let Some(s) = scalar(v) {
        out.push(format!("{pad}{label}{s}"));
        return;
    }
    if let Some(k) = key {
        out.push(format!("{pad}{k}:"));
    }
    let inner = if key.is_some() { depth + 1 } else { depth };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                walk(x, inner, Some(k), out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                walk(x, inner, Some(&format!("[{i}]")), out);
            }
        }
        _ => unreachable!(),
    }
}
