//! Sampled maximization of `|f(η)|` over the unit sphere `S^{2d−1} ⊂ ℂ^d`.
//!
//! The result is a lower bound on the true maximum: the best of a batch of
//! random points, polished by a shrinking-step random local search.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::coeff::{Coeff, C64};
use crate::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereSampler {
    pub samples: usize,
    /// Best sample points that get local refinement.
    pub refine_candidates: usize,
    pub refine_steps: usize,
    pub seed: u64,
}

impl Default for SphereSampler {
    fn default() -> Self {
        SphereSampler {
            samples: 10_000,
            refine_candidates: 8,
            refine_steps: 120,
            seed: 0x05ee_d5a3_b1e5_u64,
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..d)
        .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    normalize(&mut v);
    v
}

fn normalize(v: &mut [C64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
}

/// Coefficients rescaled to a float-safe range, plus the log of the scale.
struct Scaled {
    ln_scale: f64,
    terms: Vec<(Vec<u32>, C64)>,
}

impl Scaled {
    fn new<F: Coeff>(f: &Poly<F>) -> Self {
        let ln_scale = f
            .terms()
            .map(|(_, c)| c.ln_abs())
            .fold(f64::NEG_INFINITY, f64::max);
        let terms = f
            .terms()
            .map(|(a, c)| (a.exponents().to_vec(), c.scaled_c64(ln_scale)))
            .collect();
        Scaled { ln_scale, terms }
    }

    fn abs_at(&self, z: &[C64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(z).fold(*c, |acc, (&k, zi)| acc * zi.powu(k)))
            .sum::<C64>()
            .norm()
    }
}

impl SphereSampler {
    pub fn with_samples(samples: usize) -> Self {
        SphereSampler {
            samples,
            ..Self::default()
        }
    }

    /// `ln max_{|η|=1} |f(η)|` (sampled lower bound); `−∞` for `f = 0`.
    pub fn ln_max_modulus<F: Coeff>(&self, f: &Poly<F>) -> f64 {
        if f.is_zero() {
            return f64::NEG_INFINITY;
        }
        // A single monomial in one variable has constant modulus on the circle.
        if f.dim() == 1 && f.num_terms() == 1 {
            return f.terms().next().map(|(_, c)| c.ln_abs()).unwrap();
        }
        let scaled = Scaled::new(f);
        let d = f.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let points: Vec<Vec<C64>> = (0..self.samples.max(1)).map(|_| random_point(&mut rng, d)).collect();
        let mut values: Vec<(f64, usize)> = points
            .par_iter()
            .enumerate()
            .map(|(i, p)| (scaled.abs_at(p), i))
            .collect();
        values.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

        let best = values
            .iter()
            .take(self.refine_candidates.max(1))
            .enumerate()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(rank, &(value, idx))| {
                let mut local = ChaCha8Rng::seed_from_u64(self.seed ^ (rank as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
                self.refine(&scaled, points[idx].clone(), value, &mut local)
            })
            .reduce(|| 0.0, f64::max);
        scaled.ln_scale + best.ln()
    }

    pub fn max_modulus<F: Coeff>(&self, f: &Poly<F>) -> f64 {
        self.ln_max_modulus(f).exp()
    }

    fn refine(&self, f: &Scaled, mut point: Vec<C64>, mut value: f64, rng: &mut ChaCha8Rng) -> f64 {
        let mut step = 0.25;
        for _ in 0..self.refine_steps {
            let mut trial: Vec<C64> = point
                .iter()
                .map(|z| {
                    let dz = C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
                    z + dz * step
                })
                .collect();
            normalize(&mut trial);
            let v = f.abs_at(&trial);
            if v > value {
                value = v;
                point = trial;
            } else {
                step *= 0.85;
            }
        }
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::gauss_int;
    use crate::multiindex::MultiIndex;

    #[test]
    fn univariate_monomial_is_exact() {
        let f = Poly::monomial(MultiIndex::new(vec![7]).unwrap(), gauss_int(3, 4));
        assert!((SphereSampler::default().max_modulus(&f) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn bivariate_monomial_max_is_found() {
        // |z1 z2| on S^3 peaks at 1/2 where |z1| = |z2|.
        let f = Poly::<C64>::monomial(MultiIndex::new(vec![1, 1]).unwrap(), C64::new(1.0, 0.0));
        let m = SphereSampler::default().max_modulus(&f);
        assert!(m <= 0.5 + 1e-12);
        assert!(m > 0.5 - 1e-6, "got {m}");
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let f = crate::random::homogeneous(&mut crate::random::rng(3), 3, 4, 0.7, true);
        let s = SphereSampler::with_samples(2000);
        assert_eq!(s.ln_max_modulus(&f), s.ln_max_modulus(&f));
    }

    #[test]
    fn zero_has_no_maximum() {
        assert_eq!(SphereSampler::default().ln_max_modulus(&Poly::<C64>::zero(2)), f64::NEG_INFINITY);
    }
}
