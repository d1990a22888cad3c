//! Dense linear algebra for both coefficient backends.
//!
//! Exact systems are solved by fraction-free (Bareiss) elimination over the
//! Gaussian integers after clearing row denominators. Floating systems go
//! through an SVD, which doubles as a condition estimate.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num::integer::Integer;
use num::{BigInt, BigRational, Complex, One, Zero};

use crate::coeff::{Coeff, GaussRat, C64};
use crate::error::{Error, Result};

/// Systems whose SVD condition number exceeds this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Coeff> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[Vec<F>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn column_vector(values: Vec<F>) -> Self {
        Matrix {
            rows: values.len(),
            cols: 1,
            data: values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[F]) -> Vec<F> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn matmul(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::<F>::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> Matrix<F> {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn to_c64(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_c64())
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;

    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

type GaussInt = Complex<BigInt>;

/// Exact quotient in `ℤ[i]`; the caller guarantees divisibility.
fn gauss_div_exact(a: &GaussInt, b: &GaussInt) -> GaussInt {
    let n = b.norm_sqr();
    let num = a * b.conj();
    debug_assert!(num.re.is_multiple_of(&n) && num.im.is_multiple_of(&n));
    Complex::new(num.re / &n, num.im / &n)
}

/// Solves `A X = B` exactly with fraction-free elimination.
pub fn bareiss_solve(a: &Matrix<GaussRat>, b: &Matrix<GaussRat>) -> Result<Matrix<GaussRat>> {
    let n = a.rows;
    if a.cols != n || b.rows != n {
        return Err(Error::InvalidArgument(format!(
            "expected square system, got {}x{} with {} right-hand rows",
            a.rows, a.cols, b.rows
        )));
    }
    let width = n + b.cols;

    // Scale each row to Gaussian integers.
    let mut m: Vec<Vec<GaussInt>> = (0..n)
        .map(|i| {
            let entries: Vec<&GaussRat> = a.row(i).iter().chain(b.row(i)).collect();
            let lcm = entries.iter().fold(BigInt::one(), |acc, z| {
                acc.lcm(z.re.denom()).lcm(z.im.denom())
            });
            entries
                .into_iter()
                .map(|z| {
                    let scale = |q: &BigRational| (q * BigRational::from_integer(lcm.clone())).to_integer();
                    Complex::new(scale(&z.re), scale(&z.im))
                })
                .collect()
        })
        .collect();

    let mut prev = GaussInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&p| !m[p][k].is_zero()).ok_or(Error::Singular)?;
        m.swap(k, pivot);
        let (head, tail) = m.split_at_mut(k + 1);
        let pivot_row = &head[k];
        for row in tail.iter_mut() {
            for j in (k + 1)..width {
                let v = &pivot_row[k] * &row[j] - &row[k] * &pivot_row[j];
                row[j] = gauss_div_exact(&v, &prev);
            }
            row[k] = GaussInt::zero();
        }
        prev = m[k][k].clone();
    }

    let to_rat = |z: &GaussInt| {
        Complex::new(
            BigRational::from_integer(z.re.clone()),
            BigRational::from_integer(z.im.clone()),
        )
    };
    let mut x = Matrix::<GaussRat>::zeros(n, b.cols);
    for c in 0..b.cols {
        for i in (0..n).rev() {
            let mut acc = to_rat(&m[i][n + c]);
            for j in (i + 1)..n {
                if !m[i][j].is_zero() {
                    acc -= to_rat(&m[i][j]) * x[(j, c)].clone();
                }
            }
            x[(i, c)] = acc / to_rat(&m[i][i]);
        }
    }
    Ok(x)
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(m: &mut Matrix<GaussRat>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(p) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
            continue;
        };
        if p != row {
            for j in 0..m.cols {
                let tmp = m[(row, j)].clone();
                m[(row, j)] = m[(p, j)].clone();
                m[(p, j)] = tmp;
            }
        }
        let inv = GaussRat::one() / m[(row, col)].clone();
        for j in col..m.cols {
            m[(row, j)] = m[(row, j)].clone() * inv.clone();
        }
        for r in 0..m.rows {
            if r == row || m[(r, col)].is_zero() {
                continue;
            }
            let factor = m[(r, col)].clone();
            for j in col..m.cols {
                if !m[(row, j)].is_zero() {
                    m[(r, j)] = m[(r, j)].clone() - factor.clone() * m[(row, j)].clone();
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn exact_rank(a: &Matrix<GaussRat>) -> usize {
    rref(&mut a.clone()).len()
}

/// One basis vector per free column of the reduced row echelon form.
pub fn exact_nullspace(a: &Matrix<GaussRat>) -> Vec<Vec<GaussRat>> {
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![GaussRat::zero(); a.cols];
            v[f] = GaussRat::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[(r, f)].clone();
            }
            v
        })
        .collect()
}

/// Singular values in decreasing order.
pub fn singular_values(a: &DMatrix<C64>) -> Result<Vec<f64>> {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Ok(Vec::new());
    }
    let svd = a
        .clone()
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or(Error::SvdFailed { rows, cols })?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Solves a square floating system through its SVD after the diagonal change
/// of basis `A' = W A W⁻¹`, `W = diag(weights)`.
pub fn svd_solve(a: &Matrix<C64>, b: &Matrix<C64>, weights: Option<&[f64]>) -> Result<Matrix<C64>> {
    let n = a.rows;
    if a.cols != n || b.rows != n {
        return Err(Error::InvalidArgument("expected square system".into()));
    }
    if n == 0 {
        return Ok(Matrix::zeros(0, b.cols));
    }
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let scaled = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * (w(i) / w(j)));
    let rhs = DMatrix::from_fn(n, b.cols, |i, j| b[(i, j)] * w(i));
    let svd = scaled
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or(Error::SvdFailed { rows: n, cols: n })?;
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let y = svd
        .solve(&rhs, 0.0)
        .map_err(|_| Error::SvdFailed { rows: n, cols: n })?;
    let mut x = Matrix::zeros(n, b.cols);
    for i in 0..n {
        for j in 0..b.cols {
            x[(i, j)] = y[(i, j)] / w(i);
        }
    }
    Ok(x)
}

/// Condition number `σ_max/σ_min` of a square matrix.
pub fn condition_number(a: &Matrix<C64>) -> Result<f64> {
    let s = singular_values(&a.to_c64())?;
    Ok(match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    })
}

/// Right singular vectors whose singular value is below `1e−10·σ_max`.
pub fn float_nullspace(a: &Matrix<C64>) -> Vec<Vec<C64>> {
    let (rows, cols) = (a.rows, a.cols);
    if cols == 0 {
        return Vec::new();
    }
    // Pad with zero rows so the thin SVD yields a full right basis.
    let side = rows.max(cols);
    let padded = DMatrix::from_fn(side, cols, |i, j| {
        if i < rows {
            a[(i, j)]
        } else {
            C64::zero()
        }
    });
    let Some(svd) = padded.try_svd(false, true, f64::EPSILON, 0) else {
        return Vec::new();
    };
    let v_t = svd.v_t.expect("requested V^H");
    let smax = svd.singular_values.max();
    let tol = 1e-10 * smax.max(f64::MIN_POSITIVE);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol)
        .map(|(i, _)| (0..cols).map(|j| v_t[(i, j)].conj()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{gauss_int, rational};

    fn exact(rows: &[&[i64]]) -> Matrix<GaussRat> {
        let cols: Vec<Vec<GaussRat>> = (0..rows[0].len())
            .map(|j| rows.iter().map(|r| gauss_int(r[j], 0)).collect())
            .collect();
        Matrix::from_columns(rows.len(), &cols)
    }

    #[test]
    fn bareiss_solves_small_system() {
        let a = exact(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let x_true = Matrix::column_vector(vec![gauss_int(1, 0), gauss_int(-2, 1), gauss_int(3, 0)]);
        let b = a.matmul(&x_true);
        assert_eq!(bareiss_solve(&a, &b).unwrap(), x_true);
    }

    #[test]
    fn bareiss_handles_rational_and_complex_entries_with_pivoting() {
        let mut a = Matrix::<GaussRat>::zeros(2, 2);
        a[(0, 1)] = Complex::new(rational(1, 3), rational(2, 1));
        a[(1, 0)] = Complex::new(rational(-5, 7), rational(0, 1));
        a[(1, 1)] = gauss_int(1, 1);
        let x_true = Matrix::column_vector(vec![
            Complex::new(rational(1, 2), rational(-1, 5)),
            gauss_int(4, 0),
        ]);
        let b = a.matmul(&x_true);
        assert_eq!(bareiss_solve(&a, &b).unwrap(), x_true);
    }

    #[test]
    fn singular_exact_system_is_reported() {
        let a = exact(&[&[1, 2], &[2, 4]]);
        let b = Matrix::column_vector(vec![gauss_int(1, 0), gauss_int(2, 0)]);
        assert_eq!(bareiss_solve(&a, &b), Err(Error::Singular));
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let a = exact(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let ns = exact_nullspace(&a);
        assert_eq!(ns.len(), 2);
        assert_eq!(exact_rank(&a), 2);
        for v in &ns {
            assert!(a.mul_vec(v).iter().all(|z| z.is_zero()));
        }
    }

    #[test]
    fn float_solve_matches_exact() {
        let a = exact(&[&[4, 1], &[1, 3]]);
        let b = Matrix::column_vector(vec![gauss_int(1, 0), gauss_int(2, 0)]);
        let xe = bareiss_solve(&a, &b).unwrap();
        let af = Matrix::from_columns(2, &[a.column(0).iter().map(|z| z.to_c64()).collect(), a.column(1).iter().map(|z| z.to_c64()).collect()]);
        let bf = Matrix::column_vector(b.column(0).iter().map(|z| z.to_c64()).collect());
        let xf = svd_solve(&af, &bf, Some(&[1.0, 2.0])).unwrap();
        for i in 0..2 {
            assert!((xf[(i, 0)] - xe[(i, 0)].to_c64()).norm() < 1e-14);
        }
    }

    #[test]
    fn ill_conditioned_float_system_is_rejected() {
        let mut a = Matrix::<C64>::zeros(2, 2);
        a[(0, 0)] = C64::new(1.0, 0.0);
        a[(1, 1)] = C64::new(1e-15, 0.0);
        let b = Matrix::column_vector(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(matches!(svd_solve(&a, &b, None), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn float_nullspace_of_wide_matrix() {
        let mut a = Matrix::<C64>::zeros(1, 3);
        a[(0, 0)] = C64::new(1.0, 0.0);
        a[(0, 1)] = C64::new(0.0, 1.0);
        let ns = float_nullspace(&a);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(a.mul_vec(&v)[0].norm() < 1e-12);
        }
    }
}
