//! Proptest strategies for random Gaussian-rational polynomials.
#![allow(dead_code)]

use fischer_core::coeff::{gauss, rational, GaussRat};
use fischer_core::multiindex::enumerate_up_to;
use fischer_core::{enumerate_monomials, MultiIndex, Poly};
use proptest::prelude::*;

pub type P = Poly<GaussRat>;

pub fn coeff() -> impl Strategy<Value = GaussRat> {
    (-6i64..=6, -6i64..=6, 1i64..=4).prop_map(|(re, im, den)| gauss(rational(re, den), rational(im, den)))
}

fn from_basis(dim: usize, basis: Vec<MultiIndex>, density: f64) -> BoxedStrategy<P> {
    let n = basis.len();
    prop::collection::vec(prop::option::weighted(density, coeff()), n)
        .prop_map(move |cs| {
            let terms = basis.iter().cloned().zip(cs).filter_map(|(a, c)| c.map(|c| (a, c)));
            Poly::from_terms(dim, terms).expect("dimensions agree")
        })
        .boxed()
}

pub fn homogeneous(d: usize, m: usize) -> BoxedStrategy<P> {
    from_basis(d, enumerate_monomials(d, m).unwrap(), 0.6)
}

pub fn nonzero_homogeneous(d: usize, m: usize) -> BoxedStrategy<P> {
    homogeneous(d, m).prop_filter("nonzero", |p| !p.is_zero()).boxed()
}

pub fn polynomial(d: usize, max_degree: usize) -> BoxedStrategy<P> {
    from_basis(d, enumerate_up_to(d, max_degree).unwrap(), 0.4)
}

pub fn mono(e: &[u32], c: i64) -> P {
    P::monomial(MultiIndex::new(e.to_vec()).unwrap(), fischer_core::coeff::gauss_int(c, 0))
}
