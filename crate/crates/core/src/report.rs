//! JSON-lines and CSV report output.
//!
//! Every record is prefixed with the tool name and version, the record kind
//! and the seed of the run. Fields keep the declaration order of the record
//! type. Floats carry 17 significant digits in JSON and 6 in CSV.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub const TOOL: &str = "juntalab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const JSON_DIGITS: usize = 17;
pub const CSV_DIGITS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::param(format!("unknown format {s:?}, expected json or csv"))),
        }
    }
}

/// Fields shared by every record of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    pub kind: &'static str,
    pub seed: u64,
}

impl Envelope {
    pub fn new(kind: &'static str, seed: u64) -> Self {
        Self { kind, seed }
    }

    fn columns() -> [&'static str; 4] {
        ["tool", "tool_version", "kind", "seed"]
    }

    fn wrap(&self, record: Value) -> Result<Map<String, Value>> {
        let mut m = Map::new();
        m.insert("tool".into(), TOOL.into());
        m.insert("tool_version".into(), TOOL_VERSION.into());
        m.insert("kind".into(), self.kind.into());
        m.insert("seed".into(), self.seed.into());
        match record {
            Value::Object(fields) => {
                for (k, v) in fields {
                    if m.contains_key(&k) {
                        return Err(Error::param(format!("record field {k:?} clashes with the envelope")));
                    }
                    m.insert(k, v);
                }
            }
            other => return Err(Error::param(format!("record must serialize to an object, got {other}"))),
        }
        Ok(m)
    }
}

/// `x` with `digits` significant digits, in the style of C's `%.{digits}g`.
/// Non-finite values become `null`.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

struct SigFormatter(usize);

impl serde_json::ser::Formatter for SigFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt_sig(value, self.0).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

fn to_string_with<T: Serialize + ?Sized>(v: &T, digits: usize) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFormatter(digits));
    v.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Compact JSON with 17 significant digits per float.
pub fn to_json_string<T: Serialize + ?Sized>(v: &T) -> Result<String> {
    to_string_with(v, JSON_DIGITS)
}

fn csv_cell(v: &Value) -> Result<String> {
    Ok(match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => fmt_sig(n.as_f64().expect("f64"), CSV_DIGITS),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => to_string_with(other, CSV_DIGITS)?,
    })
}

/// Renders records as JSON lines or as CSV with a header row. With no
/// records, JSON output is empty and CSV output is the envelope header.
pub fn render<T: Serialize>(records: &[T], env: &Envelope, format: Format) -> Result<String> {
    let rows = records.iter().map(|r| env.wrap(serde_json::to_value(r)?)).collect::<Result<Vec<_>>>()?;
    match format {
        Format::Json => {
            let mut out = String::new();
            for row in &rows {
                out.push_str(&to_json_string(row)?);
                out.push('\n');
            }
            Ok(out)
        }
        Format::Csv => {
            let mut columns: Vec<String> = Envelope::columns().iter().map(|c| c.to_string()).collect();
            for row in &rows {
                for k in row.keys() {
                    if !columns.contains(k) {
                        columns.push(k.clone());
                    }
                }
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&columns).map_err(csv_err)?;
            for row in &rows {
                let cells = columns
                    .iter()
                    .map(|c| row.get(c).map_or(Ok(String::new()), csv_cell))
                    .collect::<Result<Vec<_>>>()?;
                w.write_record(&cells).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("CSV of UTF-8 strings"))
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(io::Error::other(e))
}

/// Writes the rendered records to `path`, or to stdout when `path` is `None`.
pub fn emit_report<T: Serialize>(records: &[T], env: &Envelope, format: Format, path: Option<&Path>) -> Result<()> {
    let text = render(records, env, format)?;
    match path {
        Some(p) => File::create(p)?.write_all(text.as_bytes())?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
