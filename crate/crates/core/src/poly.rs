//! Sparse multivariate polynomials over a [`Coeff`] field.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};



use crate::coeff::{Coeff, C64};
use crate::error::{Error, Result};
use crate::multiindex::{enumerate_monomials, MultiIndex};

/// Total degree, with a sentinel for the zero polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(k) => Some(k),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(k) => write!(f, "{k}"),
        }
    }
}

/// Polynomial in `dim` variables; zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct Poly<F> {
    dim: usize,
    terms: BTreeMap<MultiIndex, F>,
}

pub type ExactPoly = Poly<crate::coeff::GaussRat>;
pub type FloatPoly = Poly<C64>;

impl<F: Coeff> Poly<F> {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "polynomials need at least one variable");
        Poly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: F) -> Self {
        Self::monomial(MultiIndex::zero(dim), c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, F::one())
    }

    /// The coordinate function `z_i` (zero-based `i`).
    pub fn var(dim: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, i), F::one())
    }

    pub fn monomial(alpha: MultiIndex, c: F) -> Self {
        let mut p = Self::zero(alpha.dim());
        if !c.is_zero() {
            p.terms.insert(alpha, c);
        }
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, F)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut p = Self::zero(dim);
        for (alpha, c) in terms {
            if alpha.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: alpha.dim(),
                });
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    /// Builds the polynomial with the given coordinates in a monomial basis.
    pub fn from_coords(dim: usize, basis: &[MultiIndex], coords: &[F]) -> Self {
        debug_assert_eq!(basis.len(), coords.len());
        let mut p = Self::zero(dim);
        for (alpha, c) in basis.iter().zip(coords) {
            p.add_term(alpha.clone(), c.clone());
        }
        p
    }

    /// Coordinates in the given monomial basis; terms outside it are ignored.
    pub fn coords(&self, basis: &[MultiIndex]) -> Vec<F> {
        basis.iter().map(|a| self.coeff(a)).collect()
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&alpha) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(alpha, sum);
                }
            }
            None => {
                self.terms.insert(alpha, c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &F)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> F {
        self.terms.get(alpha).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Degree {
        // Graded order: the last key has the largest total degree.
        self.terms
            .keys()
            .next_back()
            .map_or(Degree::NegInfinity, |a| Degree::Finite(a.degree()))
    }

    /// Lowest total degree among stored terms.
    pub fn low_degree(&self) -> Degree {
        self.terms
            .keys()
            .next()
            .map_or(Degree::NegInfinity, |a| Degree::Finite(a.degree()))
    }

    /// The zero polynomial is homogeneous of every degree.
    pub fn is_homogeneous_of(&self, k: usize) -> bool {
        self.terms.keys().all(|a| a.degree() == k)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degree() == self.low_degree()
    }

    /// Returns the degree `k` if homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Result<usize> {
        match self.degree() {
            Degree::NegInfinity => Err(Error::ZeroPolynomial("homogeneous polynomial")),
            Degree::Finite(k) if self.is_homogeneous() => Ok(k),
            Degree::Finite(_) => Err(Error::NotHomogeneous { expected: None }),
        }
    }

    pub fn homogeneous_component(&self, j: usize) -> Self {
        Poly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.degree() == j)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    /// Nonzero homogeneous components keyed by degree.
    pub fn homogeneous_components(&self) -> BTreeMap<usize, Self> {
        let mut out: BTreeMap<usize, Self> = BTreeMap::new();
        for (a, c) in &self.terms {
            out.entry(a.degree())
                .or_insert_with(|| Self::zero(self.dim))
                .terms
                .insert(a.clone(), c.clone());
        }
        out
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.dim);
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                out.add_term(a.add(b), c.clone() * d.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        Poly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(a, v)| (a.clone(), v.clone() * c.clone()))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(self.dim), |acc, _| &acc * self)
    }

    /// `P*`: every coefficient conjugated.
    pub fn star(&self) -> Self {
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c.conj())).collect(),
        }
    }

    /// `∂^α f`
    pub fn derivative(&self, alpha: &MultiIndex) -> Self {
        let mut out = Self::zero(self.dim);
        for (beta, c) in &self.terms {
            if let Some(rest) = beta.checked_sub(alpha) {
                let factor = F::from_biguint(&MultiIndex::falling_factorial_ratio(beta, alpha));
                out.add_term(rest, c.clone() * factor);
            }
        }
        out
    }

    /// `Q(D) f`: each `z_j` in `q` replaced by `∂/∂z_j`.
    pub fn apply_diff_op(q: &Self, f: &Self) -> Result<Self> {
        q.check_dim(f)?;
        let mut out = Self::zero(f.dim);
        for (alpha, c) in &q.terms {
            for (beta, d) in &f.terms {
                if let Some(rest) = beta.checked_sub(alpha) {
                    let factor = F::from_biguint(&MultiIndex::falling_factorial_ratio(beta, alpha));
                    out.add_term(rest, c.clone() * d.clone() * factor);
                }
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, z: &[C64]) -> Result<C64> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: z.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(a, c)| {
                a.exponents()
                    .iter()
                    .zip(z)
                    .fold(c.to_c64(), |acc, (&e, zi)| acc * zi.powu(e))
            })
            .sum())
    }

    /// `f(z + shift)`, expanded exactly.
    pub fn translate(&self, shift: &[F]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: shift.len(),
            });
        }
        let shifted_vars: Vec<Self> = (0..self.dim)
            .map(|i| &Self::var(self.dim, i) + &Self::constant(self.dim, shift[i].clone()))
            .collect();
        let mut out = Self::zero(self.dim);
        for (a, c) in &self.terms {
            let mut term = Self::constant(self.dim, c.clone());
            for (i, &e) in a.exponents().iter().enumerate() {
                if e > 0 {
                    term = &term * &shifted_vars[i].pow(e);
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Coordinates of the degree-`m` component in the graded-lex basis.
    pub fn slice_coords(&self, m: usize) -> Vec<F> {
        let basis = enumerate_monomials(self.dim, m).expect("dim >= 1");
        self.coords(&basis)
    }

    pub fn map_coeffs<G: Coeff>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        let mut out = Poly::zero(self.dim);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), f(c));
        }
        out
    }

    pub fn to_float(&self) -> Poly<C64> {
        self.map_coeffs(|c| c.to_c64())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_c64().norm())
            .fold(0.0, f64::max)
    }
}

impl Poly<crate::coeff::GaussRat> {
    /// Lossless conversion of a floating polynomial to Gaussian rationals.
    pub fn from_float(p: &Poly<C64>) -> Result<Self> {
        let mut out = Poly::zero(p.dim());
        for (a, c) in p.terms() {
            out.add_term(a.clone(), <crate::coeff::GaussRat as Coeff>::from_c64(*c)?);
        }
        Ok(out)
    }
}

impl<F: Coeff> Add for &Poly<F> {
    type Output = Poly<F>;

    fn add(self, rhs: &Poly<F>) -> Poly<F> {
        self.checked_add(rhs).expect("dimension mismatch in polynomial addition")
    }
}

impl<F: Coeff> Sub for &Poly<F> {
    type Output = Poly<F>;

    fn sub(self, rhs: &Poly<F>) -> Poly<F> {
        self.checked_sub(rhs).expect("dimension mismatch in polynomial subtraction")
    }
}

impl<F: Coeff> Mul for &Poly<F> {
    type Output = Poly<F>;

    fn mul(self, rhs: &Poly<F>) -> Poly<F> {
        self.checked_mul(rhs).expect("dimension mismatch in polynomial multiplication")
    }
}

impl<F: Coeff> Neg for &Poly<F> {
    type Output = Poly<F>;

    fn neg(self) -> Poly<F> {
        self.scale(&-F::one())
    }
}

impl<F: Coeff> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(a, c)| format!("({c:?})*z^{a:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
