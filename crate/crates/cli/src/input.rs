use std::path::Path;

use clap::ValueEnum;
use fischer_core::coeff::parse_rational;
use fischer_core::entire::{parse_stream, AnyStream};
use fischer_core::json::{parse_poly, AnyPoly};
use fischer_core::{GaussRat, Poly, C64};
use num::{BigRational, Complex, Zero};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    /// Exact when every input is rational, floating point otherwise.
    Auto,
    Exact,
    Float,
}

pub fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load_poly(path: &Path) -> CliResult<AnyPoly> {
    parse_poly(&read(path)?).map_err(|e| match e {
        fischer_core::Error::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
        e => e.into(),
    })
}

/// Polynomials converted to one common backend.
pub enum Polys {
    Exact(Vec<Poly<GaussRat>>),
    Float(Vec<Poly<C64>>),
}

pub fn resolve(backend: Backend, polys: &[AnyPoly]) -> CliResult<Polys> {
    let exact = match backend {
        Backend::Exact => true,
        Backend::Float => false,
        Backend::Auto => polys.iter().all(AnyPoly::is_exact),
    };
    if exact {
        Ok(Polys::Exact(polys.iter().map(AnyPoly::to_exact).collect::<Result<_, _>>()?))
    } else {
        Ok(Polys::Float(polys.iter().map(AnyPoly::to_float).collect()))
    }
}

/// Stream files carry a `"kind"` tag; plain polynomial files do not.
pub fn is_stream(text: &str) -> bool {
    serde_json::from_str::<serde_json::Value>(text).is_ok_and(|v| v.get("kind").is_some())
}

pub fn load_stream(path: &Path, max_degree: usize) -> CliResult<AnyStream> {
    parse_stream(&read(path)?, max_degree).map_err(|e| match e {
        fischer_core::Error::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
        e => e.into(),
    })
}

pub enum Scalar {
    Exact(GaussRat),
    Float(C64),
}

/// `x` or `x,y` (real and imaginary parts); each part is a rational such as
/// `-3/2` or a decimal float.
pub fn parse_scalar(text: &str) -> CliResult<Scalar> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.is_empty() || parts.len() > 2 || parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Parse(format!("expected `re` or `re,im`, got {text:?}")));
    }
    let exact: Option<Vec<BigRational>> = parts.iter().map(|p| parse_rational(p).ok()).collect();
    if let Some(v) = exact {
        let im = v.get(1).cloned().unwrap_or_else(BigRational::zero);
        return Ok(Scalar::Exact(Complex::new(v[0].clone(), im)));
    }
    let floats: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|_| CliError::Parse(format!("not a number: {p:?}"))))
        .collect::<CliResult<_>>()?;
    Ok(Scalar::Float(C64::new(floats[0], floats.get(1).copied().unwrap_or(0.0))))
}
