//! Numerical quadrature: nested-rule adaptive integration and a Filon-type
//! integrator for highly oscillatory integrands with analytic phases.

mod adaptive;
mod linphase;
mod oscillatory;

pub use adaptive::{integrate_adaptive, integrate_adaptive_opts, integrate_adaptive_real};
pub use linphase::LinearPhaseTransform;
pub use oscillatory::{integrate_oscillatory, integrate_oscillatory_opts, OscOptions};

use num_complex::Complex64;

/// Outcome of a quadrature call: complex value, error estimate (including a
/// cancellation noise floor), and the number of integrand evaluations.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub err_estimate: f64,
    pub evals: usize,
}

impl QuadResult {
    pub fn zero() -> Self {
        QuadResult {
            value: Complex64::new(0.0, 0.0),
            err_estimate: 0.0,
            evals: 1,
        }
    }

    pub fn combine(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            err_estimate: self.err_estimate + other.err_estimate,
            evals: self.evals + other.evals,
        }
    }

    pub fn scale(self, c: Complex64) -> QuadResult {
        QuadResult {
            value: self.value * c,
            err_estimate: self.err_estimate * c.norm(),
            evals: self.evals,
        }
    }
}

/// Tolerances and budget for the adaptive integrator.
#[derive(Debug, Clone)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
    /// Pre-split the domain here (kinks, multiplier edges, support seams).
    pub split_points: Vec<f64>,
    /// Relative noise density of the integrand (e.g. interpolation error of
    /// a sampled profile, relative to its scale): convergence targets floor
    /// at rel_noise * integral(|f|).
    pub rel_noise: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            max_intervals: 6000,
            split_points: Vec::new(),
            rel_noise: 0.0,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            ..Default::default()
        }
    }
}
