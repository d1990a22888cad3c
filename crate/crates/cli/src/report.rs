//! Versioned JSON envelope, scalar encoding and atomic file output.

use std::io::Write;
use std::path::Path;

use fischer_core::json::PolyJson;
use fischer_core::{Coeff, GaussRat, Poly, C64};
use num::BigRational;
use serde::Serialize;
use serde_json::{json, Value};
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

pub const TOOL: &str = "fischer-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    verb: &'a str,
    payload: Value,
}

pub fn envelope(verb: &str, payload: Value) -> String {
    let env = Envelope { tool: TOOL, version: VERSION, verb, payload };
    let mut text = serde_json::to_string_pretty(&env).expect("report values are plain data");
    text.push('\n');
    text
}

/// Writes to a sibling temporary file and renames it into place, so readers
/// never observe a partial report.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Envelope to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, verb: &str, payload: Value) -> CliResult<()> {
    let text = envelope(verb, payload);
    match out {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// JSON encodings of coefficients and real values: rational strings for the
/// exact backend, plain numbers for floating point.
pub trait JsonScalar: Coeff {
    fn scalar_json(&self) -> Value;
    fn real_json(r: &Self::Real) -> Value;
    fn poly_json(p: &Poly<Self>) -> Value;
}

impl JsonScalar for GaussRat {
    fn scalar_json(&self) -> Value {
        json!({"re": self.re.to_string(), "im": self.im.to_string()})
    }

    fn real_json(r: &BigRational) -> Value {
        Value::String(r.to_string())
    }

    fn poly_json(p: &Poly<Self>) -> Value {
        serde_json::to_value(PolyJson::from(p)).expect("plain data")
    }
}

impl JsonScalar for C64 {
    fn scalar_json(&self) -> Value {
        json!({"re": self.re, "im": self.im})
    }

    fn real_json(r: &f64) -> Value {
        json!(r)
    }

    fn poly_json(p: &Poly<Self>) -> Value {
        serde_json::to_value(PolyJson::from(p)).expect("plain data")
    }
}

/// `m,sigma_min,sigma_max` rows.
pub fn sweep_csv(rows: &[(usize, f64, f64)]) -> String {
    let mut out = String::from("m,sigma_min,sigma_max\n");
    for (m, lo, hi) in rows {
        out.push_str(&format!("{m},{lo:e},{hi:e}\n"));
    }
    out
}
