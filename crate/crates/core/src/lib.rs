//! Apolar (Fischer/Bombieri) inner products, Fischer decompositions of
//! polynomials and entire functions, and singular-value analysis of
//! multiplication operators on graded polynomial spaces.
//!
//! All algebra is generic over [`Coeff`]: [`GaussRat`] gives exact results on
//! rational data, [`C64`] gives floating-point results on anything.

pub mod apolar;
pub mod coeff;
pub mod entire;
pub mod error;
pub mod fischer;
pub mod json;
pub mod linalg;
pub mod multiindex;
pub mod poly;
pub mod random;
pub mod spectral;
pub mod sphere;

pub use coeff::{Coeff, GaussRat, C64};
pub use error::{Error, Result};
pub use multiindex::{enumerate_monomials, MultiIndex};
pub use poly::{Degree, Poly};
