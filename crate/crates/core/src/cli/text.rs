//! Plain-text rendering of any JSON report: nested keys become indented
//! blocks and matrix objects are printed row by row.

use serde_json::Value;

fn is_matrix(v: &Value) -> bool {
    match v.as_object() {
        Some(o) => o.len() == 3 && o.contains_key("rows") && o.contains_key("cols") && o["data"].is_array(),
        None => false,
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            Some(format!("[{}]", items.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        // [re, im] pairs, e.g. a vector.
        Value::Array(items) if items.iter().all(|i| i.as_array().is_some_and(|p| p.len() == 2 && p.iter().all(Value::is_number))) => {
            Some(format!("[{}]", items.iter().map(|p| complex(&p[0], &p[1])).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn complex(re: &Value, im: &Value) -> String {
    let (re, im) = (re.as_f64().unwrap_or(f64::NAN), im.as_f64().unwrap_or(f64::NAN));
    format!("{re:+.6}{im:+.6}i")
}

fn matrix_lines(v: &Value, pad: &str, out: &mut String) {
    let cols = v["cols"].as_u64().unwrap_or(0) as usize;
    let data = v["data"].as_array().map(Vec::as_slice).unwrap_or(&[]);
    if cols == 0 {
        return;
    }
    for row in data.chunks(cols) {
        let cells: Vec<String> = row.iter().map(|p| complex(&p[0], &p[1])).collect();
        out.push_str(&format!("{pad}  {}\n", cells.join("  ")));
    }
}

fn walk(key: &str, v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    if is_matrix(v) {
        out.push_str(&format!("{pad}{key}: {}x{}\n", v["rows"], v["cols"]));
        matrix_lines(v, &pad, out);
        return;
    }
    if let Some(s) = scalar(v) {
        out.push_str(&format!("{pad}{key}: {s}\n"));
        return;
    }
    out.push_str(&format!("{pad}{key}:\n"));
    match v {
        Value::Object(o) => {
            for (k, child) in o {
                walk(k, child, depth + 1, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                walk(&format!("[{i}]"), child, depth + 1, out);
            }
        }
        _ => {}
    }
}

pub fn render(v: &Value) -> String {
    let mut out = String::new();
    match v.as_object() {
        Some(o) => {
            for (k, child) in o {
                walk(k, child, 0, &mut out);
            }
        }
        None => walk("value", v, 0, &mut out),
    }
    out
}
