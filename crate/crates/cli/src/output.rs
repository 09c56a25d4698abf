use serde_json::{Map, Number, Value};

/// A JSON number carrying 17 significant digits, or `null` when `v` is not
/// finite.
pub fn num(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let text = format!("{v:.16e}");
    Value::Number(text.parse::<Number>().expect("formatted float parses"))
}

/// Rewrites every non-integer number in `v` with 17 significant digits.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => n.as_f64().map_or(Value::Null, num),
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonical(v))).collect()),
        other => other,
    }
}

pub fn document(request: Value, result: Value, reports: Vec<Value>) -> Value {
    let mut top = Map::new();
    top.insert("request".into(), canonical(request));
    top.insert("result".into(), canonical(result));
    top.insert("reports".into(), Value::Array(reports.into_iter().map(canonical).collect()));
    Value::Object(top)
}

/// One CSV row; fields are numbers, so no quoting is ever needed.
pub fn csv_row(fields: &[f64]) -> String {
    let cells: Vec<String> = fields.iter().map(|v| format!("{v:.16e}")).collect();
    cells.join(",")
}
