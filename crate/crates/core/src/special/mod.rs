//! Special functions: Gamma and Bessel J of real order.

mod bessel;
mod gamma;

pub use bessel::{bessel_asymptotic_leading, bessel_j, bessel_j_scaled};
pub(crate) use bessel::{hankel_asym_min, hankel_slow_amplitude};
pub use gamma::{gamma, ln_gamma};

/// Surface measure of the unit sphere S^{d-1} in R^d.
pub fn sphere_area(d: u32) -> f64 {
    let d = d as f64;
    2.0 * std::f64::consts::PI.powf(d / 2.0) / gamma(d / 2.0)
}
