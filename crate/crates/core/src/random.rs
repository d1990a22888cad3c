//! Seeded generators of test polynomials.

use num::{BigRational, Complex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::{GaussRat, C64};
use crate::multiindex::enumerate_monomials;
use crate::poly::Poly;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small Gaussian rational with numerators in `[-6, 6]`, denominators in `[1, 4]`.
pub fn gauss_rat<R: Rng>(rng: &mut R, complex: bool) -> GaussRat {
    let part = |rng: &mut R| BigRational::new(rng.random_range(-6i64..=6).into(), rng.random_range(1i64..=4).into());
    let re = part(rng);
    let im = if complex { part(rng) } else { BigRational::from_integer(0.into()) };
    Complex::new(re, im)
}

/// Random homogeneous polynomial of degree `m`; each monomial is kept with
/// probability `density`. Never returns zero.
pub fn homogeneous<R: Rng>(rng: &mut R, d: usize, m: usize, density: f64, complex: bool) -> Poly<GaussRat> {
    let basis = enumerate_monomials(d, m).expect("d >= 1");
    loop {
        let mut p = Poly::zero(d);
        for alpha in &basis {
            if rng.random::<f64>() < density {
                p.add_term(alpha.clone(), gauss_rat(rng, complex));
            }
        }
        if !p.is_zero() {
            return p;
        }
    }
}

/// Random polynomial with every degree `0..=max_degree` populated sparsely.
pub fn polynomial<R: Rng>(rng: &mut R, d: usize, max_degree: usize, density: f64, complex: bool) -> Poly<GaussRat> {
    let mut p = Poly::zero(d);
    for m in 0..=max_degree {
        if rng.random::<f64>() < 0.8 || m == max_degree {
            p = &p + &homogeneous(rng, d, m, density, complex);
        }
    }
    p
}

pub fn complex_vector<R: Rng>(rng: &mut R, d: usize, scale: f64) -> Vec<C64> {
    (0..d)
        .map(|_| C64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale)))
        .collect()
}
