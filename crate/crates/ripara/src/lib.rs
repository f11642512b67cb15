//! Computational tools for R_I orthogonal polynomials, spectrally transformed
//! moment functionals, para-orthogonal sequences from non-Hermitian Toeplitz
//! systems, and self-inversive polynomial families on the unit circle.

pub mod cfrac;
pub mod error;
pub mod functionals;
pub mod hyper;
pub mod paraorth;
pub mod poly;
pub mod recurrence;
pub mod selfinv;
pub mod toeplitz;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use poly::ComplexPoly;

/// Shorthand for building a complex number.
#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
