//! The apolar inner product `⟨P, Q⟩_a = [Q*(D) P](0) = Σ α! c_α conj(d_α)`
//! and the classical identities and bounds built on it.

use num::{BigUint, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::coeff::{Coeff, C64};
use crate::error::{Error, Result};
use crate::multiindex::{enumerate_monomials, enumerate_up_to, factorial, MultiIndex};
use crate::poly::Poly;
use crate::sphere::SphereSampler;

fn same_dim<F: Coeff>(p: &Poly<F>, q: &Poly<F>) -> Result<()> {
    if p.dim() == q.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        })
    }
}

/// `⟨p, q⟩_a`, linear in `p` and conjugate-linear in `q`.
pub fn inner_product<F: Coeff>(p: &Poly<F>, q: &Poly<F>) -> Result<F> {
    same_dim(p, q)?;
    let (small, large, swap) = if p.num_terms() <= q.num_terms() {
        (p, q, false)
    } else {
        (q, p, true)
    };
    let mut acc = F::zero();
    for (alpha, c) in small.terms() {
        let d = large.coeff(alpha);
        if d.is_zero() {
            continue;
        }
        let (a, b) = if swap { (d, c.clone()) } else { (c.clone(), d) };
        acc = acc + a * b.conj() * F::from_biguint(&alpha.factorial());
    }
    Ok(acc)
}

/// `‖p‖_a²`, exact in the rational backend.
pub fn norm_sq<F: Coeff>(p: &Poly<F>) -> F::Real {
    p.terms().fold(F::Real::zero(), |acc, (alpha, c)| {
        acc + c.abs_sq() * F::real_from_biguint(&alpha.factorial())
    })
}

pub fn norm<F: Coeff>(p: &Poly<F>) -> f64 {
    F::real_to_f64(&norm_sq(p)).sqrt()
}

/// `ln ‖p‖_a`, finite even when the norm under- or overflows `f64`.
pub fn ln_norm<F: Coeff>(p: &Poly<F>) -> f64 {
    0.5 * F::real_ln(&norm_sq(p))
}

/// `⟨Q*(D) f, g⟩ − ⟨f, Q g⟩`, which vanishes identically.
pub fn adjoint_defect<F: Coeff>(q: &Poly<F>, f: &Poly<F>, g: &Poly<F>) -> Result<F> {
    same_dim(q, f)?;
    same_dim(f, g)?;
    let lhs = inner_product(&Poly::apply_diff_op(&q.star(), f)?, g)?;
    let rhs = inner_product(f, &(q * g))?;
    Ok(lhs - rhs)
}

/// `|⟨Q*(D) f, g⟩ − ⟨f, Q g⟩|`
pub fn adjoint_residual<F: Coeff>(q: &Poly<F>, f: &Poly<F>, g: &Poly<F>) -> Result<f64> {
    Ok(adjoint_defect(q, f, g)?.to_c64().norm())
}

/// Both sides of `‖P_k f_m‖² = Σ_α ‖(∂^α P_k*)(D) f_m‖² / α!`.
///
/// Only `|α| ≤ k` contributes: higher derivatives of `P_k*` vanish.
pub fn reznick_sides<F: Coeff>(pk: &Poly<F>, fm: &Poly<F>) -> Result<(F::Real, F::Real)> {
    same_dim(pk, fm)?;
    let k = pk.homogeneous_degree()?;
    if !fm.is_homogeneous() {
        return Err(Error::NotHomogeneous { expected: None });
    }
    let lhs = norm_sq(&(pk * fm));
    let pk_star = pk.star();
    let mut rhs = F::Real::zero();
    for alpha in enumerate_up_to(pk.dim(), k)? {
        let op = pk_star.derivative(&alpha);
        let term = norm_sq(&Poly::apply_diff_op(&op, fm)?);
        rhs = rhs + term / F::real_from_biguint(&alpha.factorial());
    }
    Ok((lhs, rhs))
}

/// `|LHS − RHS|` of the Reznick identity.
pub fn reznick_residual<F: Coeff>(pk: &Poly<F>, fm: &Poly<F>) -> Result<f64> {
    let (lhs, rhs) = reznick_sides(pk, fm)?;
    let diff = if lhs >= rhs { lhs - rhs } else { rhs - lhs };
    Ok(F::real_to_f64(&diff))
}

/// Least `C` with `‖z^α f_m‖_a ≤ C ‖f_m‖_a` for every homogeneous `f_m`:
/// `sup_{|β|=m} √((α+β)!/β!)`.
pub fn c_alpha_m(alpha: &MultiIndex, m: usize) -> f64 {
    let best = enumerate_monomials(alpha.dim(), m)
        .expect("multi-index has positive dimension")
        .iter()
        .map(|beta| MultiIndex::falling_factorial_ratio(&alpha.add(beta), alpha))
        .max()
        .unwrap_or_else(BigUint::zero);
    best.to_f64().unwrap_or(f64::INFINITY).sqrt()
}

/// `(1+m)^{k/2} Σ_{|α|=k} |c_α| √(α!)`, an upper bound for `‖P_k f_m‖/‖f_m‖`.
pub fn beauzamy_bound<F: Coeff>(pk: &Poly<F>, m: usize) -> Result<f64> {
    let k = pk.homogeneous_degree()?;
    let weight: f64 = pk
        .terms()
        .map(|(alpha, c)| c.to_c64().norm() * alpha.factorial().to_f64().unwrap_or(f64::INFINITY).sqrt())
        .sum();
    Ok((1.0 + m as f64).powf(k as f64 / 2.0) * weight)
}

/// `max(0, |f_k(z)|² − |z|^{2k} ‖f_k‖²/k!)`, which is zero by Shapiro's
/// pointwise estimate.
pub fn shapiro_pointwise_bound_residual<F: Coeff>(fk: &Poly<F>, z: &[C64]) -> Result<f64> {
    if !fk.is_homogeneous() {
        return Err(Error::NotHomogeneous { expected: None });
    }
    if fk.is_zero() {
        return Ok(0.0);
    }
    let k = fk.degree().finite().unwrap_or(0);
    let value = fk.evaluate(z)?.norm_sqr();
    let z_sq: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    let bound = z_sq.powi(k as i32) * F::real_to_f64(&norm_sq(fk)) / factorial(k).to_f64().unwrap_or(f64::INFINITY);
    Ok((value - bound).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: C64,
    pub stderr: f64,
    pub samples: usize,
}

/// Samples per independent substream; fixed so results do not depend on the
/// number of worker threads.
const MC_CHUNK: usize = 8192;

/// Monte Carlo estimate of the Gaussian integral representation
/// `π^{−d} ∫ P(x+iy) conj(Q(x+iy)) e^{−|x|²−|y|²} dx dy = ⟨P, Q⟩_a`.
///
/// `x` and `y` are drawn coordinatewise from `N(0, 1/2)`, whose joint density
/// is exactly the weight `π^{−d} e^{−|x|²−|y|²}`. Chunk `c` of the sample
/// budget uses ChaCha stream `c` keyed by `seed`.
pub fn bargmann_mc_estimate<F: Coeff>(p: &Poly<F>, q: &Poly<F>, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    same_dim(p, q)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least one sample".into()));
    }
    let (pf, qf) = (p.to_float(), q.to_float());
    let d = p.dim();
    let chunks = samples.div_ceil(MC_CHUNK);
    let partials: Vec<[f64; 4]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut acc = [0.0; 4];
            let mut z = vec![C64::new(0.0, 0.0); d];
            for _ in 0..n {
                for zi in z.iter_mut() {
                    let x: f64 = StandardNormal.sample(&mut rng);
                    let y: f64 = StandardNormal.sample(&mut rng);
                    *zi = C64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2;
                }
                let w = pf.evaluate(&z).expect("dimension checked") * qf.evaluate(&z).expect("dimension checked").conj();
                acc[0] += w.re;
                acc[1] += w.im;
                acc[2] += w.re * w.re;
                acc[3] += w.im * w.im;
            }
            acc
        })
        .collect();
    let total = partials.iter().fold([0.0; 4], |mut acc, p| {
        for (a, b) in acc.iter_mut().zip(p) {
            *a += b;
        }
        acc
    });
    let n = samples as f64;
    let mean = C64::new(total[0] / n, total[1] / n);
    let var = if samples > 1 {
        ((total[2] - n * mean.re * mean.re) + (total[3] - n * mean.im * mean.im)).max(0.0) / (n - 1.0)
    } else {
        0.0
    };
    Ok(MonteCarloEstimate {
        estimate: mean,
        stderr: (var / n).sqrt(),
        samples,
    })
}

/// `C_d = √(σ(S^{2d−1}) / (2π^d)) = 1/√((d−1)!)`.
///
/// From `‖f_m‖² = π^{−d} ∫_0^∞ e^{−r²} r^{2m+2d−1} dr ∫_S |f_m|² dσ
/// ≤ π^{−d} · Γ(m+d)/2 · σ(S^{2d−1}) · max_S |f_m|²` and
/// `σ(S^{2d−1}) = 2π^d/(d−1)!`.
pub fn sphere_constant(d: usize) -> f64 {
    1.0 / factorial(d.saturating_sub(1)).to_f64().unwrap_or(f64::INFINITY).sqrt()
}

/// `(‖f_m‖_a, C_d √((m+d−1)!) · max_{S^{2d−1}} |f_m|)` with the maximum taken
/// from the sampler, so the right side is itself a lower bound of the exact
/// right side.
pub fn sphere_max_bound_check<F: Coeff>(fm: &Poly<F>, sampler: &SphereSampler) -> Result<(f64, f64)> {
    if !fm.is_homogeneous() {
        return Err(Error::NotHomogeneous { expected: None });
    }
    if fm.is_zero() {
        return Ok((0.0, 0.0));
    }
    let m = fm.degree().finite().unwrap_or(0);
    let d = fm.dim();
    let ln_lhs = ln_norm(fm);
    let ln_fact = crate::coeff::ln_bigint(&factorial(m + d - 1));
    let ln_rhs = sphere_constant(d).ln() + 0.5 * ln_fact + sampler.ln_max_modulus(fm);
    Ok((ln_lhs.exp(), ln_rhs.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{gauss_int, rational, GaussRat};
    use num::BigRational;

    type P = Poly<GaussRat>;

    fn mono(e: &[u32], c: i64) -> P {
        P::monomial(MultiIndex::new(e.to_vec()).unwrap(), gauss_int(c, 0))
    }

    #[test]
    fn inner_product_examples() {
        let f = mono(&[2, 1], 1);
        assert_eq!(inner_product(&f, &f).unwrap(), gauss_int(2, 0));
        assert!(inner_product(&mono(&[1, 0], 1), &mono(&[0, 1], 1)).unwrap().is_zero());
        let s = &mono(&[1, 0], 1) + &mono(&[0, 1], 1);
        let s2 = &s * &s;
        assert_eq!(inner_product(&s2, &s2).unwrap(), gauss_int(8, 0));
    }

    #[test]
    fn pairing_with_one_evaluates_at_origin() {
        let p = &(&mono(&[2, 1], 3) + &mono(&[0, 0], -7)) + &mono(&[1, 0], 2);
        assert_eq!(inner_product(&p, &P::one(2)).unwrap(), gauss_int(-7, 0));
    }

    #[test]
    fn sesquilinearity() {
        let i = gauss_int(0, 1);
        let (p, q) = (mono(&[1, 1], 2), mono(&[1, 1], 3));
        let a = inner_product(&p.scale(&i), &q).unwrap();
        let b = inner_product(&p, &q.scale(&i)).unwrap();
        assert_eq!(a, gauss_int(0, 6));
        assert_eq!(b, gauss_int(0, -6));
    }

    #[test]
    fn norms() {
        for m in 0..7u32 {
            let f = (&mono(&[1, 0], 1) - &mono(&[0, 1], 1)).pow(m);
            let want = factorial(m as usize) * BigUint::from(2u32).pow(m);
            assert_eq!(norm_sq(&f), BigRational::from_integer(want.into()));
        }
        assert!(norm_sq(&P::zero(3)).is_zero());
        let a = gauss_int(2, -1);
        let f = P::monomial(MultiIndex::new(vec![4]).unwrap(), a);
        assert_eq!(norm_sq(&f), rational(5 * 24, 1));
    }

    #[test]
    fn adjoint_identity_on_example() {
        let q = mono(&[1, 1], 1);
        let f = mono(&[2, 2], 1);
        let g = mono(&[1, 1], 1);
        assert!(adjoint_defect(&q, &f, &g).unwrap().is_zero());
    }

    #[test]
    fn reznick_examples() {
        let (l, r) = reznick_sides(&mono(&[2, 0], 1), &mono(&[0, 1], 1)).unwrap();
        assert_eq!(l, rational(2, 1));
        assert_eq!(r, rational(2, 1));
        let pk = &mono(&[2, 1], 3) + &mono(&[0, 3], -1);
        let (l, r) = reznick_sides(&pk, &P::one(2)).unwrap();
        assert_eq!(l, norm_sq(&pk));
        assert_eq!(l, r);
    }

    #[test]
    fn reznick_rejects_inhomogeneous_input() {
        let bad = &mono(&[2, 0], 1) + &mono(&[0, 0], 1);
        assert!(reznick_sides(&bad, &mono(&[1, 0], 1)).is_err());
        assert!(reznick_sides(&mono(&[1, 0], 1), &bad).is_err());
    }

    #[test]
    fn c_alpha_m_examples() {
        let mi = |e: &[u32]| MultiIndex::new(e.to_vec()).unwrap();
        assert_eq!(c_alpha_m(&mi(&[0, 0]), 5), 1.0);
        assert!((c_alpha_m(&mi(&[1, 0]), 3) - 2.0).abs() < 1e-15);
        assert!((c_alpha_m(&mi(&[2, 0]), 2) - 12f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn beauzamy_examples() {
        assert!((beauzamy_bound(&mono(&[2, 0], 1), 0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let lap = &mono(&[2, 0], 1) + &mono(&[0, 2], 1);
        assert!((beauzamy_bound(&lap, 3).unwrap() - 8.0 * 2f64.sqrt()).abs() < 1e-13);
        assert!(beauzamy_bound(&(&lap + &P::one(2)), 3).is_err());
    }

    #[test]
    fn shapiro_examples() {
        for k in 1..6u32 {
            let f = mono(&[k, 0, 0], 1);
            let z = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
            assert_eq!(shapiro_pointwise_bound_residual(&f, &z).unwrap(), 0.0);
        }
        let f = &mono(&[1, 0], 1) + &mono(&[0, 1], 1);
        let one = C64::new(1.0, 0.0);
        assert_eq!(shapiro_pointwise_bound_residual(&f, &[one, one]).unwrap(), 0.0);
    }

    #[test]
    fn monte_carlo_constant_is_exact() {
        let one = P::one(2);
        let est = bargmann_mc_estimate(&one, &one, 1000, 1).unwrap();
        assert_eq!(est.estimate, C64::new(1.0, 0.0));
        assert_eq!(est.stderr, 0.0);
        assert!(bargmann_mc_estimate(&one, &one, 0, 1).is_err());
    }

    #[test]
    fn monte_carlo_is_thread_count_independent() {
        let p = mono(&[1, 1], 1);
        let q = &mono(&[1, 1], 2) + &mono(&[0, 0], 1);
        let a = bargmann_mc_estimate(&p, &q, 50_000, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| bargmann_mc_estimate(&p, &q, 50_000, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn sphere_constant_values() {
        assert_eq!(sphere_constant(1), 1.0);
        assert_eq!(sphere_constant(2), 1.0);
        assert!((sphere_constant(3) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sphere_bound_univariate_monomial_is_tight() {
        for m in 0..10u32 {
            let (lhs, rhs) = sphere_max_bound_check(&mono(&[m], 1), &SphereSampler::default()).unwrap();
            let want = factorial(m as usize).to_f64().unwrap().sqrt();
            assert!((lhs - want).abs() < 1e-12 * want);
            assert!(lhs <= rhs * (1.0 + 1e-12));
        }
        assert_eq!(sphere_max_bound_check(&P::zero(2), &SphereSampler::default()).unwrap(), (0.0, 0.0));
    }
}
