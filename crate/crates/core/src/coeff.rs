//! Coefficient fields.
//!
//! Two backends implement [`Coeff`]: [`GaussRat`] (Gaussian rationals, every
//! ring operation exact) and [`C64`] (complex double precision). Everything
//! above this module is generic over the field, so identities can be checked
//! exactly on rational data and the same code computes spectra in floating
//! point.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::Sign;
use num::{BigInt, BigRational, BigUint, Complex, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

pub type GaussRat = Complex<BigRational>;
pub type C64 = Complex<f64>;

pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Non-negative quantities such as squared norms.
    type Real: Clone
        + Debug
        + PartialOrd
        + Send
        + Sync
        + Zero
        + One
        + Add<Output = Self::Real>
        + Sub<Output = Self::Real>
        + Mul<Output = Self::Real>
        + Div<Output = Self::Real>;

    const EXACT: bool;
    const NAME: &'static str;

    fn conj(&self) -> Self;
    fn from_biguint(n: &BigUint) -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_real(r: Self::Real) -> Self;
    fn abs_sq(&self) -> Self::Real;
    fn re(&self) -> Self::Real;
    fn to_c64(&self) -> C64;
    /// Exact backends convert the binary value of each part without rounding.
    fn from_c64(c: C64) -> Result<Self>;

    fn real_from_biguint(n: &BigUint) -> Self::Real;
    fn real_to_f64(r: &Self::Real) -> f64;
    /// `ln r` for `r > 0`, robust against values outside the `f64` range;
    /// `−∞` for zero.
    fn real_ln(r: &Self::Real) -> f64;

    /// Solves `A X = B` for square nonsingular `A`. `weights`, when given, are
    /// the basis scale factors `√α!` used by the floating backend to
    /// precondition the system; exact backends ignore them.
    fn solve(a: &Matrix<Self>, rhs: &Matrix<Self>, weights: Option<&[f64]>) -> Result<Matrix<Self>>;

    /// Basis of `{x : A x = 0}`.
    fn nullspace(a: &Matrix<Self>) -> Vec<Vec<Self>>;

    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }

    /// `c · e^{−ln_scale}` as a float, computed without intermediate
    /// underflow or overflow.
    fn scaled_c64(&self, ln_scale: f64) -> C64;

    /// `ln |c|`
    fn ln_abs(&self) -> f64 {
        0.5 * Self::real_ln(&self.abs_sq())
    }
}

impl Coeff for GaussRat {
    type Real = BigRational;

    const EXACT: bool = true;
    const NAME: &'static str = "exact";

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn from_biguint(n: &BigUint) -> Self {
        Complex::new(Self::real_from_biguint(n), BigRational::zero())
    }

    fn from_i64(n: i64) -> Self {
        Complex::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    fn from_real(r: BigRational) -> Self {
        Complex::new(r, BigRational::zero())
    }

    fn abs_sq(&self) -> BigRational {
        self.norm_sqr()
    }

    fn re(&self) -> BigRational {
        self.re.clone()
    }

    fn to_c64(&self) -> C64 {
        Complex::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn from_c64(c: C64) -> Result<Self> {
        let part = |x: f64| {
            BigRational::from_float(x)
                .ok_or_else(|| Error::NotExact(format!("non-finite value {x}")))
        };
        Ok(Complex::new(part(c.re)?, part(c.im)?))
    }

    fn real_from_biguint(n: &BigUint) -> BigRational {
        BigRational::from_integer(BigInt::from_biguint(Sign::Plus, n.clone()))
    }

    fn real_to_f64(r: &BigRational) -> f64 {
        rational_to_f64(r)
    }

    fn real_ln(r: &BigRational) -> f64 {
        if r.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_bigint(r.numer().magnitude()) - ln_bigint(r.denom().magnitude())
    }

    fn scaled_c64(&self, ln_scale: f64) -> C64 {
        let part = |q: &BigRational| {
            if q.is_zero() {
                0.0
            } else {
                let sign = if q.is_negative() { -1.0 } else { 1.0 };
                sign * (Self::real_ln(&q.abs()) - ln_scale).exp()
            }
        };
        Complex::new(part(&self.re), part(&self.im))
    }

    fn solve(a: &Matrix<Self>, rhs: &Matrix<Self>, _weights: Option<&[f64]>) -> Result<Matrix<Self>> {
        linalg::bareiss_solve(a, rhs)
    }

    fn nullspace(a: &Matrix<Self>) -> Vec<Vec<Self>> {
        linalg::exact_nullspace(a)
    }
}

impl Coeff for C64 {
    type Real = f64;

    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn from_biguint(n: &BigUint) -> Self {
        Complex::new(n.to_f64().unwrap_or(f64::INFINITY), 0.0)
    }

    fn from_i64(n: i64) -> Self {
        Complex::new(n as f64, 0.0)
    }

    fn from_real(r: f64) -> Self {
        Complex::new(r, 0.0)
    }

    fn abs_sq(&self) -> f64 {
        self.norm_sqr()
    }

    fn re(&self) -> f64 {
        self.re
    }

    fn to_c64(&self) -> C64 {
        *self
    }

    fn from_c64(c: C64) -> Result<Self> {
        Ok(c)
    }

    fn real_from_biguint(n: &BigUint) -> f64 {
        n.to_f64().unwrap_or(f64::INFINITY)
    }

    fn real_to_f64(r: &f64) -> f64 {
        *r
    }

    fn real_ln(r: &f64) -> f64 {
        r.ln()
    }

    fn scaled_c64(&self, ln_scale: f64) -> C64 {
        self * (-ln_scale).exp()
    }

    fn solve(a: &Matrix<Self>, rhs: &Matrix<Self>, weights: Option<&[f64]>) -> Result<Matrix<Self>> {
        linalg::svd_solve(a, rhs, weights)
    }

    fn nullspace(a: &Matrix<Self>) -> Vec<Vec<Self>> {
        linalg::float_nullspace(a)
    }
}

/// Converts a rational to the nearest-ish `f64` without overflowing on huge
/// numerators and denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * (ln_bigint(r.numer().magnitude()) - ln_bigint(r.denom().magnitude())).exp()
}

pub fn ln_bigint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map(f64::ln).unwrap_or(f64::NEG_INFINITY);
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(1.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Parses `"p/q"` or `"p"` into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(parse_int(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn gauss(re: BigRational, im: BigRational) -> GaussRat {
    Complex::new(re, im)
}

pub fn gauss_int(re: i64, im: i64) -> GaussRat {
    Complex::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
}
