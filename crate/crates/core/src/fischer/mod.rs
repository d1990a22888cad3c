//! Fischer decompositions `f = P q + r` with `P_k*(D) r = 0`.
//!
//! The building block is the operator `T = T_{P_k}` on homogeneous
//! polynomials: `T f_m` is the unique `q ∈ P_{m−k}` with
//! `P_k*(D)(P_k q) = P_k*(D) f_m`, so that `f_m = P_k T f_m + r_m` is the
//! apolar-orthogonal splitting of `f_m` along `P_k · P_{m−k}`.
//!
//! For a non-homogeneous `P = P_k − P_{k−1} − ⋯ − P_0` two independent routes
//! are provided: [`decompose_direct`] solves the full linear system, and
//! [`decompose_series`] sums the iterated series
//! `T_P f = Σ_j Σ_{s_0..s_j} T P_{s_j} T ⋯ P_{s_0} T f`. By uniqueness they
//! agree exactly on polynomial input.

mod linear;
mod univariate;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num::ToPrimitive;
use serde::Serialize;

use crate::apolar::norm_sq;
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::multiindex::{enumerate_monomials, enumerate_up_to, MultiIndex};
use crate::poly::{Degree, Poly};

pub use linear::{decompose_linear, decompose_linear_stream, decompose_linear_with_shift, minimal_shift};
pub use univariate::{decompose_univariate, decompose_univariate_stream, hermite_interpolate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Homogeneous,
    Direct,
    Series,
    Univariate,
    LinearShift,
    EntireTruncated,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionResult<F: Coeff> {
    pub q: Poly<F>,
    pub r: Poly<F>,
    /// `‖P_k*(D) r‖_a²`; exactly zero in the rational backend.
    pub annihilator_norm_sq: F::Real,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl<F: Coeff> DecompositionResult<F> {
    fn new(pk: &Poly<F>, q: Poly<F>, r: Poly<F>, method: Method) -> Result<Self> {
        let annihilated = Poly::apply_diff_op(&pk.star(), &r)?;
        Ok(DecompositionResult {
            q,
            r,
            annihilator_norm_sq: norm_sq(&annihilated),
            method,
            diagnostics: Diagnostics::default(),
        })
    }

    /// `‖P_k*(D) r‖_a`
    pub fn annihilator_residual(&self) -> f64 {
        F::real_to_f64(&self.annihilator_norm_sq).sqrt()
    }

    /// `f − (P q + r)`
    pub fn reconstruction_error(&self, p: &Poly<F>, f: &Poly<F>) -> Poly<F> {
        &(f - &(p * &self.q)) - &self.r
    }
}

/// Matrix of `q ↦ P_k*(D)(P_k q)` on `P_{m−k}` in the graded-lex monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FischerMatrix<F: Coeff> {
    pub k: usize,
    pub source_degree: usize,
    pub basis: Vec<MultiIndex>,
    pub matrix: Matrix<F>,
}

fn leading_degree<F: Coeff>(pk: &Poly<F>) -> Result<usize> {
    match pk.degree() {
        Degree::NegInfinity => Err(Error::ZeroPolynomial("P_k")),
        Degree::Finite(k) if pk.is_homogeneous() => Ok(k),
        Degree::Finite(k) => Err(Error::NotHomogeneous { expected: Some(k) }),
    }
}

pub fn fischer_matrix<F: Coeff>(pk: &Poly<F>, m: usize) -> Result<FischerMatrix<F>> {
    let k = leading_degree(pk)?;
    if m < k {
        return Err(Error::DegreeTooLow { got: m, min: k });
    }
    let basis = enumerate_monomials(pk.dim(), m - k)?;
    let pk_star = pk.star();
    let columns: Vec<Vec<F>> = basis
        .iter()
        .map(|beta| {
            let image = Poly::apply_diff_op(&pk_star, &(pk * &Poly::monomial(beta.clone(), F::one())))
                .expect("dimensions agree");
            image.coords(&basis)
        })
        .collect();
    Ok(FischerMatrix {
        k,
        source_degree: m - k,
        matrix: Matrix::from_columns(basis.len(), &columns),
        basis,
    })
}

/// `√α!` for each basis element; the apolar-orthonormal rescaling.
pub fn orthonormal_weights(basis: &[MultiIndex]) -> Vec<f64> {
    basis
        .iter()
        .map(|a| a.factorial().to_f64().unwrap_or(f64::INFINITY).sqrt())
        .collect()
}

/// The operator `T_{P_k}` with a per-degree cache of inverted Fischer
/// matrices. Safe to share between threads; the cache is filled once per
/// degree and every entry is a deterministic function of `P_k`.
#[derive(Debug)]
pub struct FischerOperator<F: Coeff> {
    pk: Poly<F>,
    pk_star: Poly<F>,
    k: usize,
    inverses: RwLock<HashMap<usize, Arc<Matrix<F>>>>,
}

impl<F: Coeff> FischerOperator<F> {
    pub fn new(pk: &Poly<F>) -> Result<Self> {
        let k = leading_degree(pk)?;
        Ok(FischerOperator {
            pk: pk.clone(),
            pk_star: pk.star(),
            k,
            inverses: RwLock::new(HashMap::new()),
        })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn pk(&self) -> &Poly<F> {
        &self.pk
    }

    fn inverse(&self, source_degree: usize) -> Result<Arc<Matrix<F>>> {
        if let Some(inv) = self.inverses.read().expect("cache lock").get(&source_degree) {
            return Ok(Arc::clone(inv));
        }
        let fm = fischer_matrix(&self.pk, source_degree + self.k)?;
        let n = fm.basis.len();
        let weights = orthonormal_weights(&fm.basis);
        let inv = Arc::new(F::solve(&fm.matrix, &Matrix::identity(n), Some(&weights))?);
        let mut cache = self.inverses.write().expect("cache lock");
        Ok(Arc::clone(cache.entry(source_degree).or_insert(inv)))
    }

    /// `T f_m` for homogeneous `f_m`; zero when `deg f_m < k`.
    pub fn apply(&self, fm: &Poly<F>) -> Result<Poly<F>> {
        let dim = self.pk.dim();
        if fm.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: fm.dim(),
            });
        }
        let m = match fm.degree() {
            Degree::NegInfinity => return Ok(Poly::zero(dim)),
            Degree::Finite(m) if fm.is_homogeneous() => m,
            Degree::Finite(m) => return Err(Error::NotHomogeneous { expected: Some(m) }),
        };
        if m < self.k {
            return Ok(Poly::zero(dim));
        }
        let rhs = Poly::apply_diff_op(&self.pk_star, fm)?;
        if rhs.is_zero() {
            return Ok(Poly::zero(dim));
        }
        let basis = enumerate_monomials(dim, m - self.k)?;
        let coords = self.inverse(m - self.k)?.mul_vec(&rhs.coords(&basis));
        Ok(Poly::from_coords(dim, &basis, &coords))
    }

    /// `Σ_m T f_m` over the homogeneous components of `f`.
    pub fn apply_graded(&self, f: &Poly<F>) -> Result<Poly<F>> {
        let mut out = Poly::zero(self.pk.dim());
        for fm in f.homogeneous_components().values() {
            out = &out + &self.apply(fm)?;
        }
        Ok(out)
    }
}

/// `f_m = P_k T(f_m) + r_m` with `P_k*(D) r_m = 0`.
pub fn project_homogeneous<F: Coeff>(pk: &Poly<F>, fm: &Poly<F>) -> Result<DecompositionResult<F>> {
    if !fm.is_homogeneous() {
        return Err(Error::NotHomogeneous { expected: None });
    }
    let op = FischerOperator::new(pk)?;
    let q = op.apply(fm)?;
    let r = fm - &(pk * &q);
    DecompositionResult::new(pk, q, r, Method::Homogeneous)
}

/// Homogeneous `P = P_k` and arbitrary `f`: the splitting is done degree by
/// degree, `q = Σ_m T f_m`.
pub fn decompose_homogeneous<F: Coeff>(pk: &Poly<F>, f: &Poly<F>) -> Result<DecompositionResult<F>> {
    if !pk.is_homogeneous() {
        return Err(Error::NotHomogeneous { expected: None });
    }
    let q = FischerOperator::new(pk)?.apply_graded(f)?;
    let r = f - &(pk * &q);
    DecompositionResult::new(pk, q, r, Method::Homogeneous)
}

/// `(k, P_k, {s: P_s})`.
pub(crate) type LeadingSplit<F> = (usize, Poly<F>, BTreeMap<usize, Poly<F>>);

/// Splits a polynomial `P` of degree `k` into `P_k` and the lower parts
/// `P_s` written with the sign convention `P = P_k − Σ_{s<k} P_s`.
pub(crate) fn split_leading<F: Coeff>(p: &Poly<F>) -> Result<LeadingSplit<F>> {
    let k = p.degree().finite().ok_or(Error::ZeroPolynomial("P"))?;
    let mut parts = p.homogeneous_components();
    let pk = parts.remove(&k).expect("leading component is nonzero");
    let lower = parts.into_iter().map(|(s, ps)| (s, -&ps)).collect();
    Ok((k, pk, lower))
}

/// Solves `P_k*(D)(P q) = P_k*(D) f` over polynomials of degree `≤ deg f − k`.
pub fn decompose_direct<F: Coeff>(p: &Poly<F>, f: &Poly<F>) -> Result<DecompositionResult<F>> {
    if p.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: f.dim(),
        });
    }
    let (k, pk, _) = split_leading(p)?;
    let dim = p.dim();
    let n = match f.degree() {
        Degree::Finite(n) if n >= k => n,
        _ => return DecompositionResult::new(&pk, Poly::zero(dim), f.clone(), Method::Direct),
    };
    let basis = enumerate_up_to(dim, n - k)?;
    let pk_star = pk.star();
    let columns: Vec<Vec<F>> = basis
        .iter()
        .map(|beta| {
            let image = Poly::apply_diff_op(&pk_star, &(p * &Poly::monomial(beta.clone(), F::one())))
                .expect("dimensions agree");
            image.coords(&basis)
        })
        .collect();
    let a = Matrix::from_columns(basis.len(), &columns);
    let rhs = Matrix::column_vector(Poly::apply_diff_op(&pk_star, f)?.coords(&basis));
    let weights = orthonormal_weights(&basis);
    let x = F::solve(&a, &rhs, Some(&weights))?;
    let q = Poly::from_coords(dim, &basis, &x.column(0));
    let r = f - &(p * &q);
    DecompositionResult::new(&pk, q, r, Method::Direct)
}

/// Checks `P_j = 0` for `β < j < k`.
pub fn check_gap<F: Coeff>(p: &Poly<F>, beta: usize) -> Result<()> {
    let k = p.degree().finite().ok_or(Error::ZeroPolynomial("P"))?;
    if beta >= k {
        return Err(Error::InvalidArgument(format!("gap index β = {beta} must be below deg P = {k}")));
    }
    for j in (beta + 1)..k {
        if !p.homogeneous_component(j).is_zero() {
            return Err(Error::GapViolation { degree: j, beta, k });
        }
    }
    Ok(())
}

/// Iterated-series decomposition.
///
/// Level `j = −1` is `T f`; level `j+1` applies `T` to `Σ_s P_s · (level j)`.
/// Each level lowers degrees by at least `k − β`, so on polynomial input the
/// series terminates. `beta`, when given, is the declared gap index and is
/// validated; otherwise it is read off `P`.
pub fn decompose_series<F: Coeff>(p: &Poly<F>, f: &Poly<F>, beta: Option<usize>) -> Result<DecompositionResult<F>> {
    if p.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: f.dim(),
        });
    }
    if let Some(beta) = beta {
        check_gap(p, beta)?;
    }
    let (_, pk, lower) = split_leading(p)?;
    let op = FischerOperator::new(&pk)?;
    let lower_sum = lower.values().fold(Poly::zero(p.dim()), |acc, ps| &acc + ps);

    let mut q = Poly::zero(p.dim());
    let mut input = f.clone();
    let mut levels = 0;
    loop {
        let level = op.apply_graded(&input)?;
        if level.is_zero() {
            break;
        }
        levels += 1;
        q = &q + &level;
        input = &lower_sum * &level;
    }
    let r = f - &(p * &q);
    let mut out = DecompositionResult::new(&pk, q, r, Method::Series)?;
    out.diagnostics.iterations = Some(levels);
    Ok(out)
}
