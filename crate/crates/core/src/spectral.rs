//! Multiplication operators `f ↦ P_k f` from `P_m` to `P_{m+k}` in the
//! apolar-orthonormal basis `z^α/√α!`, their extremal singular values, and
//! growth-exponent fits of `σ_min(m)`.

use nalgebra::DMatrix;
use num::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::coeff::{Coeff, C64};
use crate::error::{Error, Result};
use crate::linalg::{singular_values, Matrix};
use crate::multiindex::{enumerate_monomials, slice_dim, MultiIndex};
use crate::poly::{Degree, Poly};

pub const DEFAULT_SIZE_CAP: usize = 20_000;
pub const DEFAULT_WINDOW: (usize, usize) = (8, 40);
pub const MIN_WINDOW_DEGREES: usize = 4;

#[derive(Clone, Debug)]
pub struct MultiplicationMatrix {
    pub k: usize,
    pub m: usize,
    pub row_basis: Vec<MultiIndex>,
    pub col_basis: Vec<MultiIndex>,
    pub matrix: DMatrix<C64>,
}

fn homogeneous_degree<F: Coeff>(pk: &Poly<F>) -> Result<usize> {
    match pk.degree() {
        Degree::NegInfinity => Err(Error::ZeroPolynomial("P_k")),
        Degree::Finite(0) => Err(Error::DegreeTooLow { got: 0, min: 1 }),
        Degree::Finite(k) if pk.is_homogeneous() => Ok(k),
        Degree::Finite(k) => Err(Error::NotHomogeneous { expected: Some(k) }),
    }
}

/// Matrix of `f ↦ P_k f` on `P_m` with the default size cap.
pub fn mult_matrix<F: Coeff>(pk: &Poly<F>, m: usize) -> Result<MultiplicationMatrix> {
    mult_matrix_capped(pk, m, DEFAULT_SIZE_CAP)
}

/// Entry `(δ, β)` is `c_{δ−β} √(δ!/β!)`: the `z^δ/√δ!` coordinate of
/// `P_k · z^β/√β!`.
pub fn mult_matrix_capped<F: Coeff>(pk: &Poly<F>, m: usize, cap: usize) -> Result<MultiplicationMatrix> {
    let k = homogeneous_degree(pk)?;
    let d = pk.dim();
    let rows = slice_dim(d, m + k);
    if rows > cap {
        return Err(Error::SizeCap { size: rows, cap });
    }
    let row_basis = enumerate_monomials(d, m + k)?;
    let col_basis = enumerate_monomials(d, m)?;
    let terms: Vec<(MultiIndex, C64)> = pk.terms().map(|(a, c)| (a.clone(), c.to_c64())).collect();
    let mut matrix = DMatrix::from_element(rows, col_basis.len(), C64::zero());
    for (j, beta) in col_basis.iter().enumerate() {
        for (gamma, c) in &terms {
            let delta = beta.add(gamma);
            let i = row_basis.binary_search(&delta).expect("row basis is complete");
            let ratio = MultiIndex::falling_factorial_ratio(&delta, gamma).to_f64().unwrap_or(f64::INFINITY);
            matrix[(i, j)] = c * ratio.sqrt();
        }
    }
    Ok(MultiplicationMatrix { k, m, row_basis, col_basis, matrix })
}

/// Gram matrix `⟨P_k z^β, P_k z^γ⟩_a` over the degree-`m` monomials, in the
/// coefficient field of `pk`. Equals `W M^H M W` with `W = diag(√β!)`.
pub fn multiplication_gram<F: Coeff>(pk: &Poly<F>, m: usize) -> Result<Matrix<F>> {
    homogeneous_degree(pk)?;
    let basis = enumerate_monomials(pk.dim(), m)?;
    let images: Vec<Poly<F>> = basis.iter().map(|b| pk * &Poly::monomial(b.clone(), F::one())).collect();
    let n = basis.len();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = crate::apolar::inner_product(&images[j], &images[i])?;
        }
    }
    Ok(g)
}

/// `(σ_min, σ_max)` of the multiplication matrix on `P_m`.
pub fn sigma_extremes<F: Coeff>(pk: &Poly<F>, m: usize) -> Result<(f64, f64)> {
    let mm = mult_matrix(pk, m)?;
    let s = singular_values(&mm.matrix)?;
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) => Ok((lo, hi)),
        _ => Err(Error::SvdFailed { rows: mm.matrix.nrows(), cols: mm.matrix.ncols() }),
    }
}

/// `(m, σ_min, σ_max)` for each degree, computed in parallel.
pub fn sigma_sweep<F: Coeff>(pk: &Poly<F>, degrees: &[usize]) -> Result<Vec<(usize, f64, f64)>> {
    let pk = pk.to_float();
    degrees
        .par_iter()
        .map(|&m| sigma_extremes(&pk, m).map(|(lo, hi)| (m, lo, hi)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub degrees: Vec<usize>,
    pub sigma_min: Vec<f64>,
    pub sigma_max: Vec<f64>,
    pub fitted_tau: f64,
    #[serde(rename = "fitted_C")]
    pub fitted_c: f64,
    pub fit_window: (usize, usize),
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    pub flags: Vec<String>,
}

#[derive(Serialize)]
struct ReportHeader<'a> {
    fitted_tau: f64,
    #[serde(rename = "fitted_C")]
    fitted_c: f64,
    window: (usize, usize),
    residual: f64,
    flags: &'a [String],
}

impl SpectralReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,sigma_min,sigma_max\n");
        for ((m, lo), hi) in self.degrees.iter().zip(&self.sigma_min).zip(&self.sigma_max) {
            out.push_str(&format!("{m},{lo:e},{hi:e}\n"));
        }
        out
    }

    pub fn header(&self) -> serde_json::Value {
        serde_json::to_value(ReportHeader {
            fitted_tau: self.fitted_tau,
            fitted_c: self.fitted_c,
            window: self.fit_window,
            residual: self.residual,
            flags: &self.flags,
        })
        .expect("plain data")
    }
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, rms residual)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    (intercept, slope, (rss / n).sqrt())
}

/// Fits `log σ_min(m) = log C + (τ/2) log m` over `m_min..=m_max`.
pub fn ks_exponent_fit<F: Coeff>(pk: &Poly<F>, window: (usize, usize)) -> Result<SpectralReport> {
    let (m_min, m_max) = window;
    let k = homogeneous_degree(pk)?;
    if m_min < 2 {
        return Err(Error::InvalidArgument(format!("fit window must start at m >= 2, got {m_min}")));
    }
    let count = m_max.saturating_sub(m_min) + 1;
    if m_max < m_min || count < MIN_WINDOW_DEGREES {
        return Err(Error::WindowTooSmall { got: if m_max < m_min { 0 } else { count }, min: MIN_WINDOW_DEGREES });
    }
    let degrees: Vec<usize> = (m_min..=m_max).collect();
    let sweep = sigma_sweep(pk, &degrees)?;
    let sigma_min: Vec<f64> = sweep.iter().map(|s| s.1).collect();
    let sigma_max: Vec<f64> = sweep.iter().map(|s| s.2).collect();
    if let Some(bad) = sigma_min.iter().position(|s| s.is_nan() || *s <= 0.0) {
        return Err(Error::IllConditioned { condition: 1.0 / sigma_min[bad] });
    }
    let x: Vec<f64> = degrees.iter().map(|&m| (m as f64).ln()).collect();
    let y: Vec<f64> = sigma_min.iter().map(|s| s.ln()).collect();
    let (intercept, slope, residual) = linear_fit(&x, &y);
    let tau = 2.0 * slope;

    let mut flags = Vec::new();
    if tau > k as f64 {
        flags.push(format!("fitted tau {tau:.4} exceeds k = {k}: inconsistent"));
    } else if pk.dim() > 1 && tau > (k - 1) as f64 {
        flags.push(format!("fitted tau {tau:.4} exceeds k - 1 = {}: numerically suspect", k - 1));
    }
    Ok(SpectralReport {
        degrees,
        sigma_min,
        sigma_max,
        fitted_tau: tau,
        fitted_c: intercept.exp(),
        fit_window: window,
        residual,
        flags,
    })
}

/// Basis of the kernel of `P_k(D): P_m → P_{m−k}`.
pub fn kernel_basis<F: Coeff>(pk: &Poly<F>, m: usize) -> Result<Vec<Poly<F>>> {
    let k = match pk.degree() {
        Degree::NegInfinity => return Err(Error::ZeroPolynomial("P_k")),
        Degree::Finite(k) if pk.is_homogeneous() => k,
        Degree::Finite(k) => return Err(Error::NotHomogeneous { expected: Some(k) }),
    };
    let d = pk.dim();
    let source = enumerate_monomials(d, m)?;
    if m < k {
        return Ok(source.into_iter().map(|a| Poly::monomial(a, F::one())).collect());
    }
    let target = enumerate_monomials(d, m - k)?;
    let columns: Vec<Vec<F>> = source
        .iter()
        .map(|a| {
            Poly::apply_diff_op(pk, &Poly::monomial(a.clone(), F::one()))
                .expect("dimensions agree")
                .coords(&target)
        })
        .collect();
    let a = Matrix::from_columns(target.len(), &columns);
    Ok(F::nullspace(&a).iter().map(|v| Poly::from_coords(d, &source, v)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticClass {
    /// `4ac = b²`, i.e. `P = (r z1 + s z2)²`.
    pub degenerate: bool,
    pub amenable: bool,
    /// `(r, s)` as `[re, im]` pairs when degenerate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub square_root: Option<[[f64; 2]; 2]>,
    /// `(s, −r)`: `f_m = (s z1 − r z2)^m` realizes equality in Bombieri's bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_direction: Option<[[f64; 2]; 2]>,
}

/// Classifies `P = a z1² + b z1 z2 + c z2²`. Exact backend tests are exact;
/// float tests use `|x| ≤ 1e−12 · max(|a|,|b|,|c|)²` for the discriminant and
/// `1e−12 · max(|a|,|b|,|c|)` for vanishing coefficients.
pub fn classify_quadratic_2d<F: Coeff>(a: &F, b: &F, c: &F) -> Result<QuadraticClass> {
    if a.is_zero() && b.is_zero() && c.is_zero() {
        return Err(Error::ZeroPolynomial("a z1² + b z1 z2 + c z2²"));
    }
    let scale = [a, b, c].iter().map(|x| x.to_c64().norm()).fold(0.0, f64::max);
    let vanishes = |x: &F, tol: f64| if F::EXACT { x.is_zero() } else { x.to_c64().norm() <= tol };
    let disc = F::from_i64(4) * a.clone() * c.clone() - b.clone() * b.clone();
    let degenerate = vanishes(&disc, 1e-12 * scale * scale);
    let zero = |x: &F| vanishes(x, 1e-12 * scale);
    let amenable = (!zero(a) && !zero(c) && zero(b)) || (zero(a) && zero(c) && !zero(b));

    let (square_root, witness_direction) = if degenerate {
        let (af, bf, cf) = (a.to_c64(), b.to_c64(), c.to_c64());
        let (r, s) = if af.norm() >= cf.norm() {
            let r = af.sqrt();
            (r, bf / (2.0 * r))
        } else {
            let s = cf.sqrt();
            (bf / (2.0 * s), s)
        };
        // Adding 0.0 turns -0.0 into 0.0 for stable output.
        let pair = |x: C64| [x.re + 0.0, x.im + 0.0];
        (Some([pair(r), pair(s)]), Some([pair(s), pair(-r)]))
    } else {
        (None, None)
    };
    Ok(QuadraticClass { degenerate, amenable, square_root, witness_direction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apolar::norm_sq;
    use crate::coeff::{gauss_int, GaussRat};
    use crate::multiindex::factorial;
    use num::BigRational;

    type P = Poly<GaussRat>;

    fn mono(e: &[u32], c: i64) -> P {
        P::monomial(MultiIndex::new(e.to_vec()).unwrap(), gauss_int(c, 0))
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn z1_in_two_variables() {
        let mm = mult_matrix(&mono(&[1, 0], 1), 1).unwrap();
        assert_eq!(mm.matrix.shape(), (3, 2));
        let s = singular_values(&mm.matrix).unwrap();
        assert!(close(s[0], 2f64.sqrt(), 1e-14) && close(s[1], 1.0, 1e-14));
        for m in 0..12 {
            let (lo, _) = sigma_extremes(&mono(&[1, 0], 1), m).unwrap();
            assert!(close(lo, 1.0, 1e-10), "m = {m}: {lo}");
        }
    }

    #[test]
    fn laplacian_column_at_degree_zero() {
        let mm = mult_matrix(&(&mono(&[2, 0], 1) + &mono(&[0, 2], 1)), 0).unwrap();
        assert_eq!(mm.matrix.ncols(), 1);
        assert!(close(mm.matrix.column(0).norm(), 2.0, 1e-14));
    }

    #[test]
    fn rejects_constants_and_zero() {
        assert!(mult_matrix(&P::one(2), 3).is_err());
        assert!(mult_matrix(&P::zero(2), 3).is_err());
        assert!(matches!(mult_matrix_capped(&mono(&[1, 0, 0], 1), 200, 100), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn univariate_factorial_law() {
        let a = gauss_int(2, -1);
        for k in 1..=4u32 {
            let pk = P::monomial(MultiIndex::new(vec![k]).unwrap(), a.clone());
            for m in [0usize, 5, 30] {
                let (lo, hi) = sigma_extremes(&pk, m).unwrap();
                let want = 5f64.sqrt() * (factorial(k as usize + m).to_f64().unwrap() / factorial(m).to_f64().unwrap()).sqrt();
                assert!(close(lo, want, 1e-10) && close(hi, want, 1e-10));
            }
        }
    }

    #[test]
    fn gram_matches_float_matrix() {
        let pk = &mono(&[2, 0], 1) + &P::monomial(MultiIndex::new(vec![1, 1]).unwrap(), gauss_int(1, 2));
        let m = 3;
        let gram = multiplication_gram(&pk, m).unwrap();
        let mm = mult_matrix(&pk, m).unwrap();
        let mhm = mm.matrix.adjoint() * &mm.matrix;
        let w: Vec<f64> = mm.col_basis.iter().map(|b| b.factorial().to_f64().unwrap().sqrt()).collect();
        for i in 0..w.len() {
            for j in 0..w.len() {
                let want = gram[(i, j)].to_c64();
                assert!((mhm[(i, j)] * w[i] * w[j] - want).norm() < 1e-10 * (1.0 + want.norm()));
            }
        }
    }

    #[test]
    fn degenerate_square_has_bounded_sigma_min() {
        let pk = &(&mono(&[2, 0], 1) + &mono(&[1, 1], 2)) + &mono(&[0, 2], 1);
        for m in 2..=20 {
            let (lo, _) = sigma_extremes(&pk, m).unwrap();
            assert!(lo <= 8f64.sqrt() * (1.0 + 1e-9));
        }
        // Equality witness ‖P (z1 − z2)^m‖² = ‖P‖² ‖(z1 − z2)^m‖² = 8 · m! · 2^m.
        let w = &mono(&[1, 0], 1) - &mono(&[0, 1], 1);
        for m in 0..=8u32 {
            let f = w.pow(m);
            let lhs = norm_sq(&(&pk * &f));
            assert_eq!(lhs, norm_sq(&pk) * norm_sq(&f));
            let rhs = BigRational::from_integer((factorial(m as usize) * (8u32 << m)).into());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn fit_on_linear_form_is_flat() {
        let rep = ks_exponent_fit(&mono(&[1, 0], 1), (8, 20)).unwrap();
        assert!(rep.fitted_tau.abs() < 0.05);
        assert!(close(rep.fitted_c, 1.0, 1e-8));
        assert!(rep.flags.is_empty());
        assert!(rep.to_csv().starts_with("m,sigma_min,sigma_max\n8,"));
        assert_eq!(rep.to_csv().lines().count(), 14);
    }

    #[test]
    fn fit_window_validation() {
        let p = mono(&[1, 0], 1);
        assert!(matches!(ks_exponent_fit(&p, (8, 10)), Err(Error::WindowTooSmall { got: 3, min: 4 })));
        assert!(ks_exponent_fit(&p, (1, 10)).is_err());
        assert!(ks_exponent_fit(&p, (10, 8)).is_err());
    }

    #[test]
    fn kernel_examples() {
        let basis = kernel_basis(&mono(&[2, 0], 1), 3).unwrap();
        assert_eq!(basis.len(), 2);
        let mut got: Vec<P> = basis.clone();
        got.sort_by_key(|p| format!("{p:?}"));
        let mut want = vec![mono(&[0, 3], 1), mono(&[1, 2], 1)];
        want.sort_by_key(|p| format!("{p:?}"));
        assert_eq!(got, want);

        let lap = &mono(&[2, 0], 1) + &mono(&[0, 2], 1);
        let basis = kernel_basis(&lap, 2).unwrap();
        assert_eq!(basis.len(), 2);
        for h in &basis {
            assert!(Poly::apply_diff_op(&lap, h).unwrap().is_zero());
        }
        assert!(kernel_basis(&mono(&[3], 1), 5).unwrap().is_empty());
        assert_eq!(kernel_basis(&mono(&[3], 1), 2).unwrap().len(), 1);
    }

    #[test]
    fn float_kernel_annihilates() {
        let lap = &(&mono(&[2, 0, 0], 1) + &mono(&[0, 2, 0], 1)) + &mono(&[0, 0, 2], 1);
        let basis = kernel_basis(&lap.to_float(), 4).unwrap();
        assert_eq!(basis.len(), 15 - 6);
        for h in &basis {
            assert!(Poly::apply_diff_op(&lap.to_float(), h).unwrap().max_abs_coeff() < 1e-10);
        }
    }

    #[test]
    fn quadratic_classification() {
        let g = |x| gauss_int(x, 0);
        let c = classify_quadratic_2d(&g(1), &g(2), &g(1)).unwrap();
        assert!(c.degenerate && !c.amenable);
        assert_eq!(c.square_root, Some([[1.0, 0.0], [1.0, 0.0]]));
        assert_eq!(c.witness_direction, Some([[1.0, 0.0], [-1.0, 0.0]]));

        let c = classify_quadratic_2d(&g(1), &g(0), &g(1)).unwrap();
        assert!(!c.degenerate && c.amenable);
        let c = classify_quadratic_2d(&g(1), &g(1), &g(1)).unwrap();
        assert!(!c.degenerate && !c.amenable);
        let c = classify_quadratic_2d(&g(0), &g(3), &g(0)).unwrap();
        assert!(!c.degenerate && c.amenable);
        let c = classify_quadratic_2d(&g(0), &g(0), &g(5)).unwrap();
        assert!(c.degenerate && !c.amenable);
        assert_eq!(c.witness_direction.unwrap()[1], [-0.0, -0.0]);
        assert!(classify_quadratic_2d(&g(0), &g(0), &g(0)).is_err());

        let f = |x: f64| C64::new(x, 0.0);
        assert!(classify_quadratic_2d(&f(1.0), &f(2.0 + 1e-14), &f(1.0)).unwrap().degenerate);
        assert!(!classify_quadratic_2d(&f(1.0), &f(2.0 + 1e-6), &f(1.0)).unwrap().degenerate);
    }
}
