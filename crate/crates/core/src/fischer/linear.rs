//! `k = 1`: `P = P_1 − P_0`. For `z_0` with `P_1(z_0) = P_0` we have
//! `P(z) = P_1(z − z_0)`, so decomposing `F(z) = f(z + z_0)` against the
//! homogeneous `P_1` and shifting back decomposes `f` against `P`.

use super::{project_homogeneous, DecompositionResult, Method};
use crate::coeff::Coeff;
use crate::entire::TaylorStream;
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::poly::Poly;

/// Relative tolerance for `P_1(z_0) = P_0` in the float backend.
const SHIFT_TOLERANCE: f64 = 1e-12;

fn linear_coeffs<F: Coeff>(p1: &Poly<F>) -> Result<Vec<F>> {
    if p1.is_zero() {
        return Err(Error::ZeroPolynomial("P_1"));
    }
    if !p1.is_homogeneous_of(1) {
        return Err(Error::NotHomogeneous { expected: Some(1) });
    }
    Ok((0..p1.dim()).map(|j| p1.coeff(&MultiIndex::unit(p1.dim(), j))).collect())
}

/// Minimal-norm `z_0` with `P_1(z_0) = p0`: `z_0 = p0 · conj(b) / |b|²`.
pub fn minimal_shift<F: Coeff>(p1: &Poly<F>, p0: &F) -> Result<Vec<F>> {
    let b = linear_coeffs(p1)?;
    let norm_sq = b.iter().fold(F::zero(), |acc, c| acc + F::from_real(c.abs_sq()));
    Ok(b.iter().map(|c| p0.clone() * Coeff::conj(c) / norm_sq.clone()).collect())
}

/// Decomposition with a caller-chosen shift; any valid `z_0` gives the same
/// `(q, r)`.
pub fn decompose_linear_with_shift<F: Coeff>(p1: &Poly<F>, p0: &F, f: &Poly<F>, z0: &[F]) -> Result<DecompositionResult<F>> {
    let b = linear_coeffs(p1)?;
    if f.dim() != p1.dim() {
        return Err(Error::DimensionMismatch { left: p1.dim(), right: f.dim() });
    }
    if z0.len() != b.len() {
        return Err(Error::DimensionMismatch { left: b.len(), right: z0.len() });
    }
    let value = b.iter().zip(z0).fold(F::zero(), |acc, (c, z)| acc + c.clone() * z.clone());
    let ok = if F::EXACT {
        value == *p0
    } else {
        (value - p0.clone()).to_c64().norm() <= SHIFT_TOLERANCE * p0.to_c64().norm().max(1.0)
    };
    if !ok {
        return Err(Error::InvalidArgument("shift z0 does not satisfy P_1(z0) = P_0".into()));
    }

    let shifted = f.translate(z0)?;
    let mut q_shift = Poly::zero(f.dim());
    for fm in shifted.homogeneous_components().values() {
        q_shift = &q_shift + &project_homogeneous(p1, fm)?.q;
    }
    let back: Vec<F> = z0.iter().map(|z| -z.clone()).collect();
    let q = q_shift.translate(&back)?;
    let p = p1 - &Poly::constant(p1.dim(), p0.clone());
    let r = f - &(&p * &q);
    let mut out = DecompositionResult::new(p1, q, r, Method::LinearShift)?;
    out.diagnostics.shift = Some(z0.iter().map(|z| z.to_c64()).map(|c| [c.re, c.im]).collect());
    Ok(out)
}

/// `f = (P_1 − P_0) q + r` with `P_1*(D) r = 0`.
pub fn decompose_linear<F: Coeff>(p1: &Poly<F>, p0: &F, f: &Poly<F>) -> Result<DecompositionResult<F>> {
    let z0 = minimal_shift(p1, p0)?;
    decompose_linear_with_shift(p1, p0, f, &z0)
}

/// Entire `f`: decomposes the truncation at the stream's last degree.
pub fn decompose_linear_stream<F: Coeff>(p1: &Poly<F>, p0: &F, f: &TaylorStream<F>) -> Result<DecompositionResult<F>> {
    let mut out = decompose_linear(p1, p0, &f.truncated())?;
    out.diagnostics.truncation_degree = Some(f.max_degree());
    Ok(out)
}
