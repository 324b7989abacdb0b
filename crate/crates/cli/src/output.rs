//! Deterministic JSON and CSV rendering.
//!
//! Every float is printed with 17 significant digits so that values
//! round-trip exactly. JSON objects use sorted keys.

use std::io::Write;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

/// `x` with 17 significant digits, or `None` when it is not finite.
pub fn fmt_f64(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.16e}"))
}

/// JSON number carrying the exact 17-digit text of `x`.
///
/// Non-finite values become `null`; callers flag them through `status`.
pub fn num(x: f64) -> Value {
    match fmt_f64(x) {
        Some(s) => Value::Number(Number::from_str(&s).expect("formatted float is valid JSON")),
        None => Value::Null,
    }
}

/// Builder for one command result.
pub struct Report {
    map: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, params: Map<String, Value>) -> Self {
        let mut map = Map::new();
        map.insert("command".into(), command.into());
        map.insert("params".into(), Value::Object(params));
        Self { map }
    }

    pub fn set(&mut self, key: &str, v: Value) -> &mut Self {
        self.map.insert(key.into(), v);
        self
    }

    pub fn value(&mut self, value: f64, err: f64) -> &mut Self {
        self.set("value", num(value)).set("err", num(err))
    }

    pub fn status(&mut self, s: &str) -> &mut Self {
        self.set("status", s.into())
    }

    /// Whether any number in the report failed to serialise.
    fn has_null(v: &Value) -> bool {
        match v {
            Value::Null => true,
            Value::Array(a) => a.iter().any(Self::has_null),
            Value::Object(o) => o.values().any(Self::has_null),
            _ => false,
        }
    }

    pub fn is_finite(&self) -> bool {
        !self.map.values().any(Self::has_null)
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&Value::Object(self.map.clone())).expect("JSON map serialises");
        s.push('\n');
        s
    }
}

/// Parameter map from `(name, value)` pairs.
pub fn params<const K: usize>(pairs: [(&str, Value); K]) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// One `{value, err}` object.
pub fn value_err(value: f64, err: f64) -> Value {
    let mut m = Map::new();
    m.insert("value".into(), num(value));
    m.insert("err".into(), num(err));
    Value::Object(m)
}

/// Cell of a CSV table.
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Float(x) => fmt_f64(*x).unwrap_or_else(|| "NaN".into()),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Write a header and rows as RFC 4180 CSV.
pub fn write_csv(out: impl Write, header: &[&str], rows: &[Vec<Cell>]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(Cell::text))?;
    }
    w.flush()?;
    Ok(())
}
