//! Numerical laboratory for radial Fourier analysis on R^d: Bochner-Riesz
//! means and kernels, truncated operators, a Schwartz counterexample family
//! concentrated on thin spectral annuli, Weyl fractional calculus, and the
//! spectral-window divergence experiments, all reduced to one-dimensional
//! quadrature against Bessel kernels.

pub mod divergence;
pub mod error;
pub mod family;
pub mod fit;
pub mod interp;
pub mod multiplier;
pub mod params;
pub mod profiles;
pub mod quad;
pub mod radial;
pub mod special;
pub mod tables;
pub mod truncop;
pub mod weyl;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use quad::{QuadOptions, QuadResult};
