use std::io::Write;
use std::path::Path;

use hrsft::numfmt::sig12;
use serde::Serialize;
use serde_json::{Map, Value};

/// Rounds every float in `v` to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            *v = serde_json::Number::from_f64(sig12(x)).map(Value::Number).unwrap_or(Value::Null);
        }
        Value::Array(xs) => xs.iter_mut().for_each(round_floats),
        Value::Object(m) => m.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// The result's fields at top level, followed by the run configuration.
pub fn document<T: Serialize, C: Serialize>(result: &T, config: &C) -> Value {
    let mut obj = match serde_json::to_value(result).expect("result serializes") {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    obj.insert("config".into(), serde_json::to_value(config).expect("config serializes"));
    let mut v = Value::Object(obj);
    round_floats(&mut v);
    v
}

pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

/// CSV text from a header and string rows.
pub fn to_csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(header).expect("in-memory write");
    for row in rows {
        wtr.write_record(row).expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}
