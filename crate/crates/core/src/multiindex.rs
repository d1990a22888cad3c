//! Exponent vectors and the graded-lexicographic monomial order.
//!
//! Every dense vector or matrix in this crate indexes the homogeneous slice of
//! degree `m` by [`enumerate_monomials`], so the order defined here is the
//! single source of truth for basis positions.

use std::cmp::Ordering;
use std::fmt;

use num::{BigUint, One};

use crate::error::{Error, Result};

/// Exponent vector `α ∈ ℕ₀^d`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        Ok(MultiIndex(exponents))
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// `e_i`, the exponent of the single variable `z_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// `|α|`
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// `α!`
    pub fn factorial(&self) -> BigUint {
        self.0
            .iter()
            .fold(BigUint::one(), |acc, &e| acc * factorial(e as usize))
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self − other` when `other ≤ self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// `β!/(β−α)!` for `α ≤ β`, the factor produced by `∂^α z^β`.
    pub fn falling_factorial_ratio(beta: &MultiIndex, alpha: &MultiIndex) -> BigUint {
        beta.0
            .iter()
            .zip(&alpha.0)
            .fold(BigUint::one(), |acc, (&b, &a)| {
                acc * falling(b as usize, a as usize)
            })
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded order: lower total degree first; within a degree the first variable
/// is most significant and larger exponents come first, so `z1^3 < z1^2 z2`.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub fn factorial(n: usize) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// `n (n−1) ⋯ (n−k+1)`
pub fn falling(n: usize, k: usize) -> BigUint {
    debug_assert!(k <= n);
    ((n - k + 1)..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// `C(n, k)` as a machine integer; used only for basis sizes.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim P_m = C(m+d−1, d−1)`, the number of monomials of degree `m` in `d` variables.
pub fn slice_dim(d: usize, m: usize) -> usize {
    binomial(m + d - 1, d - 1)
}

/// All `α` with `|α| = m`, in graded-lex order.
pub fn enumerate_monomials(d: usize, m: usize) -> Result<Vec<MultiIndex>> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let mut out = Vec::with_capacity(slice_dim(d, m));
    let mut current = vec![0u32; d];
    fill(&mut current, 0, m as u32, &mut out);
    Ok(out)
}

fn fill(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex(current.to_vec()));
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill(current, pos + 1, remaining - e, out);
    }
    current[pos] = 0;
}

/// All `α` with `|α| ≤ max_degree`, degree by degree.
pub fn enumerate_up_to(d: usize, max_degree: usize) -> Result<Vec<MultiIndex>> {
    let mut out = Vec::new();
    for m in 0..=max_degree {
        out.extend(enumerate_monomials(d, m)?);
    }
    Ok(out)
}
