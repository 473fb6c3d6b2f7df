//! Smooth compactly supported cutoffs and the Schwartz profile psi.
//!
//! Every cutoff is built from the standard exp(-1/x) ramp, so all profiles
//! are C-infinity with exact support metadata. The Schwartz profile psi is
//! defined through its compactly supported transform psi_hat (supported in
//! (1/4, 2), identically 1 on [1/2, 1]) extended evenly, so that
//!     psi(s) = (2 pi)^{-1} int psi_hat_even(t) e^{ist} dt
//!            = (1/pi) int_{1/4}^{2} psi_hat(t) cos(st) dt
//! is real and even with psi(0) > 0.

use crate::error::{Error, Result};
use crate::interp::CubicTable;
use crate::quad::{integrate_oscillatory_opts, LinearPhaseTransform, OscOptions};
use num_complex::Complex64;
use std::f64::consts::PI;

/// C-infinity ramp: 0 for x <= a, 1 for x >= b, strictly increasing between.
pub fn smoothstep(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::InvalidParam(format!(
            "smoothstep: need a < b, got ({a}, {b})"
        )));
    }
    Ok(ramp((x - a) / (b - a), 1.0))
}

fn ramp(u: f64, sharpness: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let g = (-sharpness / u).exp();
    let h = (-sharpness / (1.0 - u)).exp();
    g / (g + h)
}

fn ramp_deriv(u: f64, s: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        return 0.0;
    }
    let g = (-s / u).exp();
    let h = (-s / (1.0 - u)).exp();
    let gp = s / (u * u) * g;
    let hp = -s / ((1.0 - u) * (1.0 - u)) * h;
    (gp * h - g * hp) / ((g + h) * (g + h))
}

/// Smooth bump: 0 outside `support`, 1 on `plateau`, C-infinity ramps between.
#[derive(Debug, Clone)]
pub struct BumpSpec {
    pub support: (f64, f64),
    pub plateau: (f64, f64),
    pub sharpness: f64,
}

impl BumpSpec {
    pub fn new(support: (f64, f64), plateau: (f64, f64), sharpness: f64) -> Result<Self> {
        let (a, b) = support;
        let (c, e) = plateau;
        if !(a < c && c <= e && e < b) {
            return Err(Error::InvalidParam(format!(
                "bump: need a < c <= e < b, got support ({a}, {b}), plateau ({c}, {e})"
            )));
        }
        if !(sharpness > 0.0) {
            return Err(Error::InvalidParam("bump: sharpness must be > 0".into()));
        }
        Ok(BumpSpec {
            support,
            plateau,
            sharpness,
        })
    }

    /// Symmetric bump without a flat top.
    pub fn peaked(support: (f64, f64), sharpness: f64) -> Result<Self> {
        let m = 0.5 * (support.0 + support.1);
        let eps = 1e-9 * (support.1 - support.0);
        BumpSpec::new(support, (m - eps, m + eps), sharpness)
    }

    /// The transform-side profile: supported in (1/4, 2), == 1 on [1/2, 1].
    pub fn psi_hat() -> Self {
        BumpSpec::new((0.25, 2.0), (0.5, 1.0), 1.0).unwrap()
    }

    /// The spectral window profile eta: supported in (-2, 2), == 1 on [-1, 1].
    pub fn eta() -> Self {
        BumpSpec::new((-2.0, 2.0), (-1.0, 1.0), 1.0).unwrap()
    }

    /// Ball-type radial cutoff (evaluated at |r|): == 1 on [0, inner],
    /// 0 beyond outer.
    pub fn ball(inner: f64, outer: f64, sharpness: f64) -> Result<Self> {
        BumpSpec::new((-outer, outer), (-inner, inner), sharpness)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (a, b) = self.support;
        let (c, e) = self.plateau;
        if t <= a || t >= b {
            0.0
        } else if t >= c && t <= e {
            1.0
        } else if t < c {
            ramp((t - a) / (c - a), self.sharpness)
        } else {
            ramp((b - t) / (b - e), self.sharpness)
        }
    }

    /// Analytic first derivative (chain rule through the ramps).
    pub fn eval_deriv(&self, t: f64) -> f64 {
        let (a, b) = self.support;
        let (c, e) = self.plateau;
        if t <= a || t >= b || (t >= c && t <= e) {
            0.0
        } else if t < c {
            ramp_deriv((t - a) / (c - a), self.sharpness) / (c - a)
        } else {
            -ramp_deriv((b - t) / (b - e), self.sharpness) / (b - e)
        }
    }
}

/// Smooth dyadic partition of unity on (0, infinity):
/// theta rises from 0 to 1 across [1/2, 1]; chi(r) = theta(r) - theta(r/2) is
/// supported in (1/2, 2) and sum_n chi(2^{-n} r) telescopes to 1 exactly.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    pub sharpness: f64,
    /// chi_lower = sum_{n < base_index} chi(2^{-n} r); 10 reproduces the
    /// reference decomposition, desk-scale runs use 4.
    pub base_index: i32,
}

impl Default for DyadicPartition {
    fn default() -> Self {
        DyadicPartition {
            sharpness: 1.0,
            base_index: 10,
        }
    }
}

impl DyadicPartition {
    pub fn theta(&self, r: f64) -> f64 {
        ramp((r - 0.5) / 0.5, self.sharpness)
    }

    /// chi(r) = theta(r) - theta(r/2), supported in (1/2, 2), == 1 at r = 1.
    pub fn chi(&self, r: f64) -> f64 {
        self.theta(r) - self.theta(0.5 * r)
    }

    /// chi(2^{-n} r)
    pub fn eval(&self, n: i32, r: f64) -> f64 {
        self.chi(r * (-n as f64).exp2())
    }

    /// Telescoped partial sum_{n < base_index}: 1 on r <= 2^{base_index - 1},
    /// 0 beyond 2^{base_index + 1}.
    pub fn chi_lower(&self, r: f64) -> f64 {
        1.0 - self.theta(r * (-self.base_index as f64).exp2())
    }

    /// Finite (by support) full sum over n; must equal 1 for every r > 0.
    pub fn partition_sum(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::InvalidParam(format!(
                "partition_sum: r = {r} must be positive"
            )));
        }
        let center = r.log2().floor() as i32;
        let mut sum = 0.0;
        for n in center - 2..=center + 2 {
            sum += self.eval(n, r);
        }
        Ok(sum)
    }
}

/// The Schwartz profile psi with cached samples and a certified tail.
pub struct SchwartzProfile {
    pub hat: BumpSpec,
    table: CubicTable,
    /// Filon decomposition of psi_hat, reused for direct evaluations.
    transform: LinearPhaseTransform,
    /// |psi(s)| < tail_bound for |s| > s_max (integration-by-parts envelope).
    pub s_max: f64,
    pub tail_bound: f64,
    psi0: f64,
}

impl SchwartzProfile {
    /// Build the sample cache: dense step on [0, 20], coarser to s_max.
    /// s_max is chosen from the order-6 integration-by-parts envelope
    /// |psi(s)| <= ||psi_hat^{(6)}||_1 / (pi s^6) < tail_tol.
    pub fn build(hat: BumpSpec, tail_tol: f64) -> Result<Self> {
        let c6 = 1.5 * hat_derivative_l1(&hat, 6);
        let s_max = ((c6 / (PI * tail_tol)).powf(1.0 / 6.0)).clamp(60.0, 1500.0);
        let tail_bound = c6 / (PI * s_max.powi(6));

        let mut xs: Vec<f64> = Vec::new();
        let mut s = 0.0;
        while s < 20.0 {
            xs.push(s);
            s += 0.01;
        }
        while s < s_max {
            xs.push(s);
            s += 0.05;
        }
        xs.push(s_max);

        let (a, b) = hat.support;
        let transform = LinearPhaseTransform::new(
            |t| Complex64::new(hat.eval(t) / PI, 0.0),
            a,
            b,
            1e-13,
        );
        let table = CubicTable::from_fn(xs, |s| Complex64::new(transform.eval(s).re, 0.0));
        let psi0 = table.eval_real(0.0);
        debug_assert!(psi0 > 0.0);
        Ok(SchwartzProfile {
            hat,
            table,
            transform,
            s_max,
            tail_bound,
            psi0,
        })
    }

    /// psi(s) from the cache; exact 0 beyond the certified tail radius.
    pub fn eval(&self, s: f64) -> f64 {
        let a = s.abs();
        if a > self.s_max {
            0.0
        } else {
            self.table.eval_real(a)
        }
    }

    /// Uncached evaluation through the Filon decomposition of psi_hat.
    pub fn eval_direct(&self, s: f64) -> f64 {
        self.transform.eval(s.abs()).re
    }

    /// Fully independent evaluation by general-purpose quadrature of the
    /// defining integral (slow; for cross-checks).
    pub fn eval_reference(&self, s: f64) -> f64 {
        psi_direct(&self.hat, s)
    }

    pub fn value_at_zero(&self) -> f64 {
        self.psi0
    }

    pub fn interp_err(&self) -> f64 {
        self.table.interp_err
    }

    pub fn table(&self) -> &CubicTable {
        &self.table
    }

    pub fn from_parts(hat: BumpSpec, table: CubicTable, s_max: f64, tail_bound: f64) -> Self {
        let (a, b) = hat.support;
        let transform = LinearPhaseTransform::new(
            {
                let hat = hat.clone();
                move |t| Complex64::new(hat.eval(t) / PI, 0.0)
            },
            a,
            b,
            1e-13,
        );
        let psi0 = table.eval_real(0.0);
        SchwartzProfile {
            hat,
            table,
            transform,
            s_max,
            tail_bound,
            psi0,
        }
    }
}

/// (1/pi) int psi_hat(t) cos(st) dt over the support of psi_hat.
fn psi_direct(hat: &BumpSpec, s: f64) -> f64 {
    let (a, b) = hat.support;
    let s = s.abs();
    let opts = OscOptions {
        rel_tol: 1e-11,
        stationary_hint: Some(Vec::new()),
        ..Default::default()
    };
    let r = integrate_oscillatory_opts(
        |t| Complex64::new(hat.eval(t) / PI, 0.0),
        |t| s * t,
        |_| s,
        a,
        b,
        &opts,
    )
    .expect("psi sample integral");
    r.value.re
}

/// Numerical L1 norm of the k-th derivative of the bump (finite differences
/// on a fine grid); used only to certify the tail envelope, so a modest
/// relative error is acceptable.
fn hat_derivative_l1(hat: &BumpSpec, k: usize) -> f64 {
    assert!(k == 6);
    let (a, b) = hat.support;
    let h = 1e-2 * (b - a) / 1.75;
    // 7-point central stencil for the 6th derivative.
    let coef = [1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0];
    let n = 4000;
    let mut l1 = 0.0;
    for i in 0..=n {
        let t = a + (b - a) * i as f64 / n as f64;
        let mut d = 0.0;
        for (j, c) in coef.iter().enumerate() {
            d += c * hat.eval(t + (j as f64 - 3.0) * h);
        }
        l1 += (d / h.powi(6)).abs() * (b - a) / n as f64;
    }
    l1
}
