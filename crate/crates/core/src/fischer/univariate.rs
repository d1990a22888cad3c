//! One variable: `r` is the Hermite interpolant of `f` at the zeros of `P`.
//!
//! With exact coefficients the zeros need not be rational, so the exact
//! backend uses the equivalent characterization `r = f mod P` (the unique
//! polynomial of degree `< k` agreeing with `f` to the right order at every
//! zero). The floating backend interpolates at numerically computed zeros.

use nalgebra::{DMatrix, Schur};
use num::{One, ToPrimitive, Zero};

use super::{DecompositionResult, Method};
use crate::coeff::{Coeff, C64};
use crate::entire::TaylorStream;
use crate::error::{Error, Result};
use crate::linalg::{svd_solve, Matrix};
use crate::multiindex::{falling, MultiIndex};
use crate::poly::Poly;

/// Relative residual `|p(ρ)| / Σ|a_i||ρ|^i` above which a computed zero is
/// rejected.
const ROOT_TOLERANCE: f64 = 1e-6;

fn dense_coeffs<F: Coeff>(p: &Poly<F>) -> Vec<F> {
    let n = p.degree().finite().map_or(0, |k| k + 1);
    let mut out = vec![F::zero(); n];
    for (a, c) in p.terms() {
        out[a.exponents()[0] as usize] = c.clone();
    }
    out
}

fn from_dense<F: Coeff>(coeffs: &[F]) -> Poly<F> {
    let mut p = Poly::zero(1);
    for (i, c) in coeffs.iter().enumerate() {
        p.add_term(MultiIndex::new(vec![i as u32]).expect("nonempty"), c.clone());
    }
    p
}

/// Long division `a = q p + r`, `deg r < deg p`.
fn div_rem<F: Coeff>(a: &[F], p: &[F]) -> (Vec<F>, Vec<F>) {
    let k = p.len() - 1;
    let lead = p[k].clone();
    let mut rem = a.to_vec();
    if rem.len() <= k {
        rem.resize(k, F::zero());
        return (Vec::new(), rem);
    }
    let mut quot = vec![F::zero(); rem.len() - k];
    for i in (0..quot.len()).rev() {
        let c = rem[i + k].clone() / lead.clone();
        if !c.is_zero() {
            for (j, pj) in p.iter().enumerate() {
                rem[i + j] = rem[i + j].clone() - c.clone() * pj.clone();
            }
        }
        quot[i] = c;
    }
    rem.truncate(k);
    (quot, rem)
}

fn horner(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::zero(), |acc, c| acc * z + c)
}

/// `f^{(j)}(z)` from Taylor coefficients.
fn derivative_at(coeffs: &[C64], j: usize, z: C64) -> C64 {
    coeffs
        .iter()
        .enumerate()
        .skip(j)
        .rev()
        .fold(C64::zero(), |acc, (n, c)| {
            acc * z + c * falling(n, j).to_f64().unwrap_or(f64::INFINITY)
        })
}

/// Zeros of `p` with multiplicities: companion-matrix eigenvalues clustered at
/// the perturbation scale `ε^{1/k}` expected of a root of multiplicity up to
/// `k`, then one Newton step per cluster.
fn roots_with_multiplicity(p: &[C64]) -> Result<(Vec<(C64, usize)>, f64)> {
    let k = p.len() - 1;
    // Zero roots are split off exactly; Schur iteration stalls on nilpotent blocks.
    let zeros = p.iter().take_while(|c| c.norm() == 0.0).count();
    let rest = &p[zeros..];
    let n = rest.len() - 1;
    let lead = rest[n];
    let mut eigen: Vec<C64> = vec![C64::zero(); zeros];
    if n == 1 {
        eigen.push(-rest[0] / lead);
    } else if n > 1 {
        let companion = DMatrix::from_fn(n, n, |i, j| {
            if j == n - 1 {
                -rest[i] / lead
            } else if i == j + 1 {
                C64::one()
            } else {
                C64::zero()
            }
        });
        let schur = Schur::try_new(companion, f64::EPSILON, 1000 * n).ok_or(Error::RootFinding { residual: f64::NAN })?;
        let (_, t) = schur.unpack();
        eigen.extend((0..n).map(|i| t[(i, i)]));
    }
    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for z in eigen {
        let tol = 10.0 * f64::EPSILON.powf(1.0 / k as f64) * z.norm().max(1.0);
        match clusters.iter_mut().find(|c| (c[0] - z).norm() <= tol) {
            Some(c) => c.push(z),
            None => clusters.push(vec![z]),
        }
    }
    // The centroid of a perturbed μ-fold cluster is accurate to O(ε), and the
    // root is simple for p^{(μ−1)}, so one Newton step there is well posed.
    let roots: Vec<(C64, usize)> = clusters
        .iter()
        .map(|c| {
            let mult = c.len();
            let z = c.iter().sum::<C64>() / mult as f64;
            let (g, dg) = (derivative_at(p, mult - 1, z), derivative_at(p, mult, z));
            if dg.norm() == 0.0 {
                return (z, mult);
            }
            let next = z - g / dg;
            if derivative_at(p, mult - 1, next).norm() < g.norm() {
                (next, mult)
            } else {
                (z, mult)
            }
        })
        .collect();
    let residual = roots
        .iter()
        .map(|&(z, _)| {
            let scale: f64 = p.iter().enumerate().map(|(i, c)| c.norm() * z.norm().powi(i as i32)).sum();
            horner(p, z).norm() / scale.max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    if residual.is_nan() || residual > ROOT_TOLERANCE {
        return Err(Error::RootFinding { residual });
    }
    Ok((roots, residual))
}

/// Polynomial of degree `< Σ μ_i` matching `f^{(j)}(ρ_i)` for `j < μ_i`,
/// given `f` by its Taylor coefficients.
pub fn hermite_interpolate(roots: &[(C64, usize)], f: &[C64]) -> Result<Vec<C64>> {
    let k: usize = roots.iter().map(|r| r.1).sum();
    let mut a = Matrix::<C64>::zeros(k, k);
    let mut b = Vec::with_capacity(k);
    let mut row = 0;
    for &(z, mult) in roots {
        for j in 0..mult {
            for n in j..k {
                a[(row, n)] = z.powu((n - j) as u32) * falling(n, j).to_f64().unwrap_or(f64::INFINITY);
            }
            b.push(derivative_at(f, j, z));
            row += 1;
        }
    }
    Ok(svd_solve(&a, &Matrix::column_vector(b), None)?.column(0))
}

fn decompose_dense<F: Coeff>(p: &Poly<F>, f: &[F]) -> Result<DecompositionResult<F>> {
    if p.dim() != 1 {
        return Err(Error::InvalidArgument(format!("univariate decomposition needs d = 1, got {}", p.dim())));
    }
    let pc = dense_coeffs(p);
    if pc.is_empty() {
        return Err(Error::ZeroPolynomial("P"));
    }
    let k = pc.len() - 1;
    let pk = p.homogeneous_component(k);
    if k == 0 {
        // Constant P: q = f/P, r = 0.
        let q: Vec<F> = f.iter().map(|c| c.clone() / pc[0].clone()).collect();
        return DecompositionResult::new(&pk, from_dense(&q), Poly::zero(1), Method::Univariate);
    }

    if F::EXACT {
        let (q, r) = div_rem(f, &pc);
        return DecompositionResult::new(&pk, from_dense(&q), from_dense(&r), Method::Univariate);
    }

    let pf: Vec<C64> = pc.iter().map(|c| c.to_c64()).collect();
    let ff: Vec<C64> = f.iter().map(|c| c.to_c64()).collect();
    let (roots, root_residual) = roots_with_multiplicity(&pf)?;
    let r: Vec<C64> = hermite_interpolate(&roots, &ff)?;
    let mut numer = ff.clone();
    numer.resize(numer.len().max(r.len()), C64::zero());
    for (n, c) in numer.iter_mut().zip(&r) {
        *n -= c;
    }
    let (q, leftover) = div_rem(&numer, &pf);
    let back = |v: &[C64]| -> Result<Vec<F>> { v.iter().map(|c| F::from_c64(*c)).collect() };
    let mut out = DecompositionResult::new(&pk, from_dense(&back(&q)?), from_dense(&back(&r)?), Method::Univariate)?;
    out.diagnostics.root_residual = Some(root_residual);
    out.diagnostics.tail_estimate = Some(leftover.iter().map(|c| c.norm()).fold(0.0, f64::max));
    Ok(out)
}

/// `f = P q + r` with `deg r < deg P` for univariate polynomial `f`.
pub fn decompose_univariate<F: Coeff>(p: &Poly<F>, f: &Poly<F>) -> Result<DecompositionResult<F>> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch { left: p.dim(), right: f.dim() });
    }
    decompose_dense(p, &dense_coeffs(f))
}

/// Entire `f` given by its Taylor stream; `q` is computed by synthetic
/// division of the truncation up to the stream's last degree.
pub fn decompose_univariate_stream<F: Coeff>(p: &Poly<F>, f: &TaylorStream<F>) -> Result<DecompositionResult<F>> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch { left: p.dim(), right: f.dim() });
    }
    let coeffs: Vec<F> = (0..=f.max_degree())
        .map(|m| {
            let c = f.component(m);
            c.terms().next().map(|(_, v)| v.clone()).unwrap_or_else(F::zero)
        })
        .collect();
    let mut out = decompose_dense(p, &coeffs)?;
    out.diagnostics.truncation_degree = Some(f.max_degree());
    Ok(out)
}
