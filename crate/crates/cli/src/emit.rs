//! JSON and CSV rendering. Integers print exactly; other numbers are rounded
//! to 12 significant digits and printed in their shortest form.

use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::{CliError, Result};

pub fn round_sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

/// Decimal text of `v` after rounding, as JSON would print it.
pub fn decimal(v: f64) -> String {
    match Number::from_f64(round_sig(v)) {
        Some(n) => n.to_string(),
        None => "null".to_string(),
    }
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().and_then(|f| Number::from_f64(round_sig(f))) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Compact JSON followed by a newline.
pub fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| CliError::Encode(e.to_string()))?;
    round_floats(&mut v);
    let mut s = serde_json::to_string(&v).map_err(|e| CliError::Encode(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn csv<R, S>(header: &[&str], rows: R) -> Result<String>
where
    R: IntoIterator<Item = Vec<S>>,
    S: AsRef<[u8]>,
{
    let enc = |e: csv::Error| CliError::Encode(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(enc)?;
    for row in rows {
        w.write_record(row).map_err(enc)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Encode(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Encode(e.to_string()))
}
