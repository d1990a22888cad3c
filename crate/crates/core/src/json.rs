//! Polynomial interchange format.
//!
//! ```json
//! {"dim": 2, "terms": [{"exp": [2, 0], "re": "1/2", "im": "0"}]}
//! ```
//!
//! Rational strings select the exact backend; plain numbers select the float
//! backend. A file with any plain number is read as floating point.

use num::{BigRational, Complex, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::{parse_rational, GaussRat, C64};
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::poly::Poly;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Number {
    Rational(String),
    Float(f64),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub re: Number,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Number>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolyJson {
    pub dim: usize,
    pub terms: Vec<TermJson>,
}

/// A parsed polynomial in whichever backend its file selected.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyPoly {
    Exact(Poly<GaussRat>),
    Float(Poly<C64>),
}

impl AnyPoly {
    pub fn dim(&self) -> usize {
        match self {
            AnyPoly::Exact(p) => p.dim(),
            AnyPoly::Float(p) => p.dim(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AnyPoly::Exact(_))
    }

    pub fn to_float(&self) -> Poly<C64> {
        match self {
            AnyPoly::Exact(p) => p.to_float(),
            AnyPoly::Float(p) => p.clone(),
        }
    }

    pub fn to_exact(&self) -> Result<Poly<GaussRat>> {
        match self {
            AnyPoly::Exact(p) => Ok(p.clone()),
            AnyPoly::Float(p) => Poly::from_float(p),
        }
    }
}

impl PolyJson {
    pub fn is_exact(&self) -> bool {
        self.terms.iter().all(|t| {
            matches!(t.re, Number::Rational(_))
                && t.im.as_ref().is_none_or(|n| matches!(n, Number::Rational(_)))
        })
    }

    pub fn to_poly(&self) -> Result<AnyPoly> {
        if self.dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        for t in &self.terms {
            if t.exp.len() != self.dim {
                return Err(Error::Parse(format!(
                    "exponent {:?} has length {}, expected {}",
                    t.exp,
                    t.exp.len(),
                    self.dim
                )));
            }
        }
        if self.is_exact() {
            let terms = self
                .terms
                .iter()
                .map(|t| {
                    let re = exact_part(&t.re)?;
                    let im = t.im.as_ref().map(exact_part).transpose()?.unwrap_or_else(BigRational::zero);
                    Ok((MultiIndex::new(t.exp.clone())?, Complex::new(re, im)))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyPoly::Exact(Poly::from_terms(self.dim, terms)?))
        } else {
            let terms = self
                .terms
                .iter()
                .map(|t| {
                    let re = float_part(&t.re)?;
                    let im = t.im.as_ref().map(float_part).transpose()?.unwrap_or(0.0);
                    Ok((MultiIndex::new(t.exp.clone())?, Complex::new(re, im)))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyPoly::Float(Poly::from_terms(self.dim, terms)?))
        }
    }
}

fn exact_part(n: &Number) -> Result<BigRational> {
    match n {
        Number::Rational(s) => parse_rational(s),
        Number::Float(x) => Err(Error::Parse(format!("unexpected float {x} in exact polynomial"))),
    }
}

fn float_part(n: &Number) -> Result<f64> {
    match n {
        Number::Float(x) => Ok(*x),
        Number::Rational(s) => Ok(crate::coeff::rational_to_f64(&parse_rational(s)?)),
    }
}

fn rational_string(q: &BigRational) -> String {
    q.to_string()
}

impl From<&Poly<GaussRat>> for PolyJson {
    fn from(p: &Poly<GaussRat>) -> Self {
        PolyJson {
            dim: p.dim(),
            terms: p
                .terms()
                .map(|(a, c)| TermJson {
                    exp: a.exponents().to_vec(),
                    re: Number::Rational(rational_string(&c.re)),
                    im: Some(Number::Rational(rational_string(&c.im))),
                })
                .collect(),
        }
    }
}

impl From<&Poly<C64>> for PolyJson {
    fn from(p: &Poly<C64>) -> Self {
        PolyJson {
            dim: p.dim(),
            terms: p
                .terms()
                .map(|(a, c)| TermJson {
                    exp: a.exponents().to_vec(),
                    re: Number::Float(c.re),
                    im: Some(Number::Float(c.im)),
                })
                .collect(),
        }
    }
}

impl From<&AnyPoly> for PolyJson {
    fn from(p: &AnyPoly) -> Self {
        match p {
            AnyPoly::Exact(p) => p.into(),
            AnyPoly::Float(p) => p.into(),
        }
    }
}

pub fn parse_poly(text: &str) -> Result<AnyPoly> {
    let raw: PolyJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    raw.to_poly()
}

pub fn poly_to_json<P>(p: P) -> String
where
    PolyJson: From<P>,
{
    serde_json::to_string(&PolyJson::from(p)).expect("polynomial JSON is always serializable")
}
