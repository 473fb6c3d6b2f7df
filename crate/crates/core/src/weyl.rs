//! Weyl fractional calculus on compactly supported windows: the one-sided
//! kernel chi_-^nu, fractional derivatives realizing (-d/dt)^nu, the
//! reconstruction identity Psi = Psi^{(nu)} * chi_-^{nu-1}, spectral windows
//! Psi_j, and the subordination identity expressing Psi(-Delta) through
//! Bochner-Riesz means.
//!
//! Convention: Psi^{(nu)} = (-d/dt)^nu, the unique choice with real kernels
//! for which the reconstruction identity holds (checked numerically); for
//! integer nu this is (-1)^nu d^nu/dt^nu.

use crate::error::{Error, Result};
use crate::multiplier::{br_mean, RadialMultiplier};
use crate::params::schedule;
use crate::profiles::BumpSpec;
use crate::quad::{integrate_adaptive_opts, QuadOptions, QuadResult};
use crate::radial::RadialProfile;
use crate::special::gamma;
use num_complex::Complex64;
use std::sync::Arc;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// chi_-^nu(x) = |x|^nu 1_{x<0} / Gamma(nu+1), locally integrable for nu > -1.
pub fn chi_minus(nu: f64, x: f64) -> Result<f64> {
    if !(nu > -1.0) {
        return Err(Error::InvalidParam(format!(
            "chi_minus: nu = {nu} <= -1 is only defined by analytic continuation; \
             use the composed Weyl formulas instead"
        )));
    }
    Ok(if x < 0.0 {
        x.abs().powf(nu) / gamma(nu + 1.0)
    } else {
        0.0
    })
}

/// Smooth compactly supported window with finite-difference derivatives.
#[derive(Clone)]
pub struct CompactProfile {
    f: RealFn,
    pub support: (f64, f64),
    /// Finite-difference step, scaled to the window width.
    h_step: f64,
    /// Analytic first derivative when available (bump-built profiles).
    d1: Option<RealFn>,
}

/// Central stencils: order 6 for k = 1, 2; order 4 for k = 3, 4.
const D1: [f64; 7] = [-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
const D2: [f64; 7] = [1.0 / 90.0, -3.0 / 20.0, 1.5, -49.0 / 18.0, 1.5, -3.0 / 20.0, 1.0 / 90.0];
const D3: [f64; 7] = [0.125, -1.0, 13.0 / 8.0, 0.0, -13.0 / 8.0, 1.0, -0.125];
const D4: [f64; 7] = [-1.0 / 6.0, 2.0, -6.5, 28.0 / 3.0, -6.5, 2.0, -1.0 / 6.0];

impl CompactProfile {
    pub fn new(f: RealFn, support: (f64, f64)) -> Self {
        let h_step = (support.1 - support.0) / 400.0;
        CompactProfile {
            f,
            support,
            h_step,
            d1: None,
        }
    }

    pub fn from_bump(bump: &BumpSpec) -> Self {
        let support = bump.support;
        let b = bump.clone();
        let b2 = bump.clone();
        let mut prof = CompactProfile::new(Arc::new(move |t| b.eval(t)), support);
        prof.d1 = Some(Arc::new(move |t| b2.eval_deriv(t)));
        prof
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.support.0 || t >= self.support.1 {
            0.0
        } else {
            (self.f)(t)
        }
    }

    /// k-th classical derivative, k <= 4: analytic when available (k = 1),
    /// otherwise central finite differences.
    pub fn derivative(&self, k: usize, t: f64) -> Result<f64> {
        if k == 1 {
            if let Some(d1) = &self.d1 {
                return Ok(if t <= self.support.0 || t >= self.support.1 {
                    0.0
                } else {
                    d1(t)
                });
            }
        }
        let stencil: &[f64; 7] = match k {
            1 => &D1,
            2 => &D2,
            3 => &D3,
            4 => &D4,
            _ => {
                return Err(Error::InvalidParam(format!(
                    "CompactProfile::derivative: order {k} not supported (need 1..=4)"
                )))
            }
        };
        let h = self.h_step;
        let mut acc = 0.0;
        for (i, c) in stencil.iter().enumerate() {
            if *c != 0.0 {
                acc += c * self.eval(t + (i as f64 - 3.0) * h);
            }
        }
        Ok(acc / h.powi(k as i32))
    }
}

/// Weyl fractional derivative Psi^{(nu)}(t) under the (-d/dt)^nu convention.
///
/// nu < 0: (1/Gamma(-nu)) int_0^inf u^{-nu-1} Psi(t+u) du (fractional integral).
/// nu >= 0 non-integer: with nu0 = floor(nu)+1,
///   (1/Gamma(nu0-nu)) int_0^inf u^{nu0-nu-1} (-1)^{nu0} Psi^{(nu0)}(t+u) du.
/// Integer orders return (-1)^n Psi^{(n)} directly.
pub fn weyl_derivative(profile: &CompactProfile, nu: f64, t: f64) -> Result<f64> {
    let sup_end = profile.support.1;
    if t >= sup_end {
        return Ok(0.0); // support invariant: vanishes beyond sup supp Psi
    }
    let rounded = nu.round();
    if (nu - rounded).abs() < 1e-12 && rounded >= 0.0 {
        let n = rounded as usize;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(match n {
            0 => profile.eval(t),
            _ => sign * profile.derivative(n, t)?,
        });
    }

    let (alpha, inner): (f64, Box<dyn Fn(f64) -> f64>) = if nu < 0.0 {
        // u^{-nu-1} has exponent in (-1, inf); alpha = -nu
        let p = profile.clone();
        (-nu, Box::new(move |s: f64| p.eval(s)))
    } else {
        let nu0 = nu.floor() as usize + 1;
        let sign = if nu0 % 2 == 0 { 1.0 } else { -1.0 };
        let p = profile.clone();
        (
            nu0 as f64 - nu,
            Box::new(move |s: f64| sign * p.derivative(nu0, s).unwrap_or(f64::NAN)),
        )
    };
    let upper = sup_end - t;
    let value = endpoint_singular_integral(
        |u| inner(t + u),
        alpha,
        upper,
        1e-11,
    )?;
    Ok(value / gamma(alpha))
}

/// int_0^U u^{alpha-1} g(u) du with alpha in (0, 1] (endpoint singularity at
/// u = 0 handled by geometric grading).
fn endpoint_singular_integral(
    g: impl Fn(f64) -> f64,
    alpha: f64,
    upper: f64,
    tol: f64,
) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParam(format!(
            "endpoint_singular_integral: alpha = {alpha}"
        )));
    }
    if upper <= 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut hi = upper;
    // geometric panels towards 0; innermost remainder appended analytically
    for _ in 0..48 {
        let lo = hi / 2.0;
        let r = integrate_adaptive_opts(
            |u| Complex64::new(u.powf(alpha - 1.0) * g(u), 0.0),
            lo,
            hi,
            &QuadOptions {
                rel_tol: tol,
                max_intervals: 600,
                ..Default::default()
            },
        );
        match r {
            Ok(q) => total += q.value.re,
            Err(e) => {
                let (v, _) = e.best_estimate().ok_or(e.clone())?;
                total += v.re;
            }
        }
        hi = lo;
        if hi < 1e-14 * upper {
            break;
        }
    }
    // remainder [0, hi]: g nearly constant there
    total += g(0.5 * hi) * hi.powf(alpha) / alpha;
    Ok(total)
}

/// max_t | (Psi^{(nu)} * chi_-^{nu-1})(t) - Psi(t) | over the grid.
pub fn reconstruction_check(profile: &CompactProfile, nu: f64, ts: &[f64]) -> Result<f64> {
    if !(nu > 0.0 && nu <= 3.0) {
        return Err(Error::InvalidParam(format!(
            "reconstruction_check: nu = {nu} outside (0, 3]"
        )));
    }
    let mut worst: f64 = 0.0;
    for &t in ts {
        let upper = profile.support.1 - t;
        let recon = if upper <= 0.0 {
            0.0
        } else {
            endpoint_singular_integral(
                |u| weyl_derivative(profile, nu, t + u).unwrap_or(f64::NAN),
                nu,
                upper,
                1e-9,
            )? / gamma(nu)
        };
        worst = worst.max((recon - profile.eval(t)).abs());
    }
    Ok(worst)
}

/// Spectral window Psi_j(t) = eta((N_j eps_j)^{-1} (t - N_j)).
pub fn psi_j_window(j: u32, gamma_par: f64, eta: &BumpSpec, t: f64) -> Result<f64> {
    let (eps, n) = schedule(j, gamma_par)?;
    Ok(eta.eval((t - n) / (n * eps)))
}

/// Psi_j as a compact profile on its natural support.
pub fn psi_j_profile(j: u32, gamma_par: f64, eta: &BumpSpec) -> Result<CompactProfile> {
    let (eps, n) = schedule(j, gamma_par)?;
    let w = n * eps;
    let e = eta.clone();
    let support = (n + w * eta.support.0, n + w * eta.support.1);
    let mut prof = CompactProfile::new(Arc::new(move |t| e.eval((t - n) / w)), support);
    prof.h_step = (support.1 - support.0) / 400.0;
    Ok(prof)
}

#[derive(Debug, Clone)]
pub struct WeylWindowRow {
    pub t: f64,
    pub derivative: f64,
    pub envelope: f64,
}

#[derive(Debug, Clone)]
pub struct WeylWindowReport {
    pub j: u32,
    pub delta: f64,
    /// Smallest constant with |Psi_j^{(delta+1)}(t)| <= C (N eps)^{-delta-1}
    /// (1 + (N eps)^{-1} |N - t|)^{-delta} on the sampled grid.
    pub c_delta: f64,
    /// int t^delta |Psi_j^{(delta+1)}(t)| dt over the sampled range.
    pub integral_t_delta: f64,
    pub rows: Vec<WeylWindowRow>,
}

/// Fit the envelope constant for Psi_j^{(delta+1)} and measure its
/// t^delta-weighted L1 mass.
pub fn psi_j_weyl_bound_check(
    j: u32,
    gamma_par: f64,
    delta: f64,
    eta: &BumpSpec,
) -> Result<WeylWindowReport> {
    if !(0.0..2.0).contains(&delta) {
        return Err(Error::InvalidParam(format!(
            "psi_j_weyl_bound_check: delta = {delta} outside [0, 2)"
        )));
    }
    let (eps, n) = schedule(j, gamma_par)?;
    let w = n * eps;
    let prof = psi_j_profile(j, gamma_par, eta)?;
    let nu = delta + 1.0;
    // The Weyl derivative spreads to the left of the window; sample far
    // enough to see the (1 + |N-t|/(N eps))^{-delta} envelope.
    let t_lo = (n - 40.0 * w).max(0.25 * w);
    let t_hi = n + 3.0 * w;
    let ts = crate::interp::linear_grid(t_lo, t_hi, 220);
    let mut rows = Vec::with_capacity(ts.len());
    let mut c_delta: f64 = 0.0;
    let mut integral = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for &t in &ts {
        let d = weyl_derivative(&prof, nu, t)?;
        let envelope = w.powf(-delta - 1.0) * (1.0 + (n - t).abs() / w).powf(-delta)
            * if t <= n + 1.0 { 1.0 } else { 0.0 };
        if envelope > 0.0 {
            c_delta = c_delta.max(d.abs() / envelope);
        }
        let weighted = t.max(0.0).powf(delta) * d.abs();
        if let Some((tp, wp)) = prev {
            integral += 0.5 * (weighted + wp) * (t - tp);
        }
        prev = Some((t, weighted));
        rows.push(WeylWindowRow {
            t,
            derivative: d,
            envelope,
        });
    }
    Ok(WeylWindowReport {
        j,
        delta,
        c_delta,
        integral_t_delta: integral,
        rows,
    })
}

/// Both sides of the subordination identity
///   Psi(-Delta) f (x) = (1/Gamma(delta+1)) int t^delta Psi^{(delta+1)}(t)
///                        S_{sqrt t}^delta f (x) dt
/// on a rapidly decaying profile where all limits are classical.
pub fn subordination_check(
    f: &RadialProfile,
    window: &CompactProfile,
    delta: f64,
    d: u32,
    x_mag: f64,
    tol: f64,
) -> Result<(QuadResult, QuadResult)> {
    let (lo, hi) = window.support;
    let m = RadialMultiplier::new(
        {
            let w = window.clone();
            Arc::new(move |s| w.eval(s))
        },
        (lo.max(0.0), hi),
    );
    let lhs = crate::multiplier::apply_multiplier(&m, f, d, x_mag, tol)?;

    let mut rhs_evals = 0usize;
    let rhs = integrate_adaptive_opts(
        |t| {
            let wd = weyl_derivative(window, delta + 1.0, t).unwrap_or(f64::NAN);
            if wd == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let s = br_mean(f, d, delta, t.sqrt(), x_mag, tol)
                .map(|r| {
                    rhs_evals += r.evals;
                    r.value
                })
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            t.powf(delta) * wd * s
        },
        1e-8,
        hi,
        &QuadOptions {
            rel_tol: tol.max(1e-8),
            max_intervals: 400,
            split_points: vec![lo],
            ..Default::default()
        },
    );
    let mut rhs = match rhs {
        Ok(q) => q,
        Err(e) => {
            let (value, err) = e.best_estimate().ok_or(e.clone())?;
            QuadResult {
                value,
                err_estimate: err,
                evals: 0,
            }
        }
    };
    rhs.value /= gamma(delta + 1.0);
    rhs.err_estimate /= gamma(delta + 1.0);
    rhs.evals += rhs_evals;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_bump() -> CompactProfile {
        CompactProfile::from_bump(&BumpSpec::new((0.5, 3.5), (1.5, 2.5), 1.0).unwrap())
    }

    #[test]
    fn chi_minus_values() {
        assert!((chi_minus(0.0, -2.0).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(chi_minus(0.0, 2.0).unwrap(), 0.0);
        assert!((chi_minus(1.0, -3.0).unwrap() - 3.0).abs() < 1e-15);
        let v = chi_minus(0.5, -1.0).unwrap();
        assert!((v - 1.0 / gamma(1.5)).abs() < 1e-13);
        assert!((v - 1.128379).abs() < 1e-6);
        assert!(chi_minus(-1.0, -1.0).is_err());
    }

    #[test]
    fn integer_orders() {
        let p = test_bump();
        let t = 1.0;
        assert_eq!(weyl_derivative(&p, 0.0, t).unwrap(), p.eval(t));
        let d1 = weyl_derivative(&p, 1.0, t).unwrap();
        assert!((d1 + p.derivative(1, t).unwrap()).abs() < 1e-12);
        // beyond the support the derivative vanishes exactly
        assert_eq!(weyl_derivative(&p, 0.7, 4.0).unwrap(), 0.0);
    }

    #[test]
    fn fractional_against_direct_quadrature() {
        // nu = 0.5 at t = 0.3 vs the defining integral at tighter tolerance
        let p = test_bump();
        let (nu, t) = (0.5, 0.3);
        let val = weyl_derivative(&p, nu, t).unwrap();
        // oracle: same formula, dense midpoint Riemann sum with grading
        let nu0 = 1usize;
        let alpha = nu0 as f64 - nu;
        let upper = p.support.1 - t;
        let mut oracle = 0.0;
        let n = 4_000_000usize;
        for i in 0..n {
            let u = upper * ((i as f64 + 0.5) / n as f64).powi(3);
            let du = upper * 3.0 * ((i as f64 + 0.5) / n as f64).powi(2) / n as f64;
            oracle += u.powf(alpha - 1.0) * (-p.derivative(1, t + u).unwrap()) * du;
        }
        oracle /= gamma(alpha);
        assert!(
            (val - oracle).abs() < 1e-8 * oracle.abs().max(0.1),
            "{val} vs oracle {oracle}"
        );
    }

    #[test]
    fn reconstruction_integer_exact() {
        let p = test_bump();
        let ts = crate::interp::linear_grid(0.0, 3.6, 25);
        let err = reconstruction_check(&p, 1.0, &ts).unwrap();
        assert!(err < 1e-10, "nu=1 reconstruction error {err}");
    }

    #[test]
    fn reconstruction_fractional() {
        let p = test_bump();
        let ts = crate::interp::linear_grid(0.1, 3.4, 12);
        for &nu in &[0.5, 1.5] {
            let err = reconstruction_check(&p, nu, &ts).unwrap();
            assert!(err < 1e-6, "nu={nu} reconstruction error {err}");
        }
    }

    #[test]
    fn window_values() {
        let eta = BumpSpec::eta();
        let (eps, n) = schedule(1, 0.2).unwrap();
        assert_eq!(psi_j_window(1, 0.2, &eta, n).unwrap(), 1.0);
        assert_eq!(
            psi_j_window(1, 0.2, &eta, n + 2.5 * n * eps).unwrap(),
            0.0
        );
        assert!(psi_j_window(1, 0.2, &eta, n + 1.5 * n * eps).unwrap() > 0.0);
    }

    #[test]
    fn window_bound_constant_stable() {
        let eta = BumpSpec::eta();
        let mut consts = Vec::new();
        for j in 0..=2 {
            let rep = psi_j_weyl_bound_check(j, 0.2, 0.3, &eta).unwrap();
            assert!(rep.c_delta.is_finite() && rep.c_delta > 0.0);
            consts.push(rep.c_delta);
        }
        let (lo, hi) = consts
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(l, h), &c| (l.min(c), h.max(c)));
        assert!(hi / lo < 2.0, "C_delta spread {consts:?}");
    }

    #[test]
    fn subordination_on_gaussian() {
        let f = RadialProfile::gaussian(2);
        // window supported in (2, 6), == 1 on [3, 5]
        let w = CompactProfile::from_bump(&BumpSpec::new((2.0, 6.0), (3.0, 5.0), 1.0).unwrap());
        for &delta in &[0.5, 1.0] {
            let (lhs, rhs) = subordination_check(&f, &w, delta, 2, 1.0, 1e-8).unwrap();
            let rel = (lhs.value - rhs.value).norm() / lhs.value.norm();
            assert!(
                rel < 1e-3,
                "delta={delta}: lhs {} rhs {} rel {rel:.2e}",
                lhs.value,
                rhs.value
            );
        }
    }

    #[test]
    fn subordination_vanishing_window() {
        // window supported where f_hat vanishes: both sides ~ 0
        let f = RadialProfile::gaussian(2);
        let w = CompactProfile::from_bump(
            &BumpSpec::new((900.0, 1000.0), (930.0, 970.0), 1.0).unwrap(),
        );
        let (lhs, rhs) = subordination_check(&f, &w, 0.5, 2, 1.0, 1e-8).unwrap();
        // scale of a non-vanishing configuration is ~ f(x) ~ 0.6
        assert!(lhs.value.norm() < 1e-6);
        assert!(rhs.value.norm() < 1e-3);
    }
}
