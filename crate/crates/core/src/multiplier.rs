//! Radial spectral calculus: m(-Delta) f for radial f, the Bochner-Riesz
//! kernel K_t^delta, and the means S_t^delta.
//!
//! Everything follows the fixed convention
//!     f_hat(xi) = (2 pi)^{-d} int f e^{-i<x,xi>} dx,
//!     f(x)      = int f_hat(xi) e^{i<x,xi>} dxi,
//! so m(-Delta) f (x) = F_d[ m(rho^2) f_hat(rho) ](|x|), with the forward
//! transform taken numerically unless the profile carries its transform.

use crate::error::{Error, Result};
use crate::interp::CubicTable;
use crate::quad::QuadResult;
use crate::radial::{fourier_forward, radial_fourier, RadialProfile};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Radial Fourier multiplier m(s), s = |xi|^2, active on a certified window.
#[derive(Clone)]
pub struct RadialMultiplier {
    pub m: RealFn,
    /// Window in s outside which m vanishes (hard truncation).
    pub window: (f64, f64),
    /// Breakpoints in rho where m is not smooth (e.g. the edge rho = t).
    pub splits_rho: Vec<f64>,
}

impl RadialMultiplier {
    pub fn new(m: RealFn, window: (f64, f64)) -> Self {
        RadialMultiplier {
            m,
            window,
            splits_rho: Vec::new(),
        }
    }

    pub fn with_splits(mut self, splits_rho: Vec<f64>) -> Self {
        self.splits_rho = splits_rho;
        self
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s < self.window.0 || s > self.window.1 {
            0.0
        } else {
            (self.m)(s)
        }
    }
}

/// Bochner-Riesz multiplier (1 - s/t^2)_+^delta; derivative singular at the
/// edge rho = t for delta < 1, so panels split there.
pub fn br_multiplier(delta: f64, t: f64) -> RadialMultiplier {
    assert!(t > 0.0 && delta >= 0.0);
    let t2 = t * t;
    RadialMultiplier::new(
        Arc::new(move |s| {
            let u = 1.0 - s / t2;
            if u <= 0.0 {
                0.0
            } else {
                u.powf(delta)
            }
        }),
        (0.0, t2),
    )
    .with_splits(vec![t])
}

/// m(rho^2) f_hat(rho) prepared for repeated spatial evaluations.
pub struct PreparedMultiplier {
    integrand: RadialProfile,
    pub dim: u32,
    /// Evaluations spent sampling the forward transform.
    pub prep_evals: usize,
}

/// Points per oscillation period when sampling a numeric forward transform.
const FREQ_SAMPLES_PER_PERIOD: f64 = 16.0;
const MAX_FREQ_SAMPLES: usize = 400_000;

/// Sampling grid for the forward transform over [rho_lo, rho_hi].
///
/// Amplitude profiles: uniform with step 2 pi / (16 R), R the mass radius.
/// Profiles carrying a chirp e^{i Phi}: the transform concentrates on the
/// instantaneous-frequency band Phi'(window); that band gets the full
/// density, the remainder a coarse grid whose aliasing is accounted for by
/// the caller (second return value flags this).
fn frequency_grid(f: &RadialProfile, rho_lo: f64, rho_hi: f64) -> Result<(Vec<f64>, bool)> {
    let r_extent = f.mass_radius.unwrap_or(f.window.1).min(f.window.1).max(1.0);
    let step = 2.0 * PI / (r_extent * FREQ_SAMPLES_PER_PERIOD);
    match &f.extra_phase {
        None => {
            let n = ((rho_hi - rho_lo) / step).ceil() as usize + 2;
            if n > MAX_FREQ_SAMPLES {
                return Err(Error::InvalidParam(format!(
                    "forward-transform sampling would need {n} points (cap {MAX_FREQ_SAMPLES}); \
                     shrink the multiplier window or the profile support"
                )));
            }
            Ok((crate::interp::linear_grid(rho_lo.max(0.0), rho_hi, n.max(8)), false))
        }
        Some(ph) => {
            // Instantaneous-frequency band of the chirp over the window.
            let (lo_w, hi_w) = f.window;
            let mut f_lo = f64::INFINITY;
            let mut f_hi = f64::NEG_INFINITY;
            for i in 0..=64 {
                let r = lo_w + (hi_w - lo_w) * i as f64 / 64.0;
                let v = (ph.deriv)(r).abs();
                f_lo = f_lo.min(v);
                f_hi = f_hi.max(v);
            }
            let margin = 40.0 * step;
            let band = (
                (f_lo - margin).max(rho_lo),
                (f_hi + margin).min(rho_hi),
            );
            let mut grid: Vec<f64> = Vec::new();
            let coarse_n = 800usize;
            grid.extend(crate::interp::linear_grid(rho_lo.max(0.0), rho_hi, coarse_n));
            if band.1 > band.0 {
                let n_band =
                    (((band.1 - band.0) / step).ceil() as usize + 2).min(MAX_FREQ_SAMPLES / 2);
                grid.extend(crate::interp::linear_grid(band.0, band.1, n_band.max(8)));
            }
            grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
            grid.dedup_by(|a, b| (*a - *b) < 0.25 * step.min(1e-6));
            Ok((grid, true))
        }
    }
}

pub fn prepare_multiplier(
    m: &RadialMultiplier,
    f: &RadialProfile,
    d: u32,
    tol: f64,
) -> Result<PreparedMultiplier> {
    let rho_lo = m.window.0.max(0.0).sqrt();
    let rho_hi = m.window.1.sqrt();
    if !(rho_hi > rho_lo) {
        return Err(Error::InvalidParam("multiplier window empty".into()));
    }
    let mut prep_evals = 0usize;

    let integrand: RadialProfile = match &f.freq_side {
        Some(g) => {
            // f_hat = (2 pi)^{-d} G
            let c = (2.0 * PI).powf(-(d as f64));
            let g = g.clone();
            let mfun = m.clone();
            let real = g.real_valued;
            let mut prof = RadialProfile::analytic(
                d,
                (rho_lo, rho_hi),
                0.0,
                real,
                Arc::new(move |rho| g.eval(rho) * c * mfun.eval(rho * rho)),
            );
            prof.split_points = m.splits_rho.clone();
            prof
        }
        None => {
            if f.tail_bound.is_none() {
                return Err(Error::TailNotCertified("prepare_multiplier input".into()));
            }
            let (xs, aliasing_guard) = frequency_grid(f, rho_lo, rho_hi)?;
            let mut worst_err = 0.0f64;
            let mut coarse_max = 0.0f64;
            let ys: Vec<Complex64> = xs
                .iter()
                .map(|&rho| {
                    let r = fourier_forward(f, d, rho, tol)?;
                    prep_evals += r.evals;
                    worst_err = worst_err.max(r.err_estimate);
                    if aliasing_guard {
                        coarse_max = coarse_max.max(r.value.norm());
                    }
                    Ok(r.value)
                })
                .collect::<Result<_>>()?;
            let mut table = CubicTable::new(xs, ys);
            // probe the cubic interpolation against direct transforms
            {
                let (gx, _) = table.nodes();
                let n_nodes = gx.len();
                let mut worst = 0.0f64;
                for i in 0..12usize.min(n_nodes - 1) {
                    let idx = 1 + (n_nodes - 2) * i / 12;
                    let xm = 0.5 * (gx[idx] + gx[idx + 1]);
                    if let Ok(direct) = fourier_forward(f, d, xm, tol) {
                        prep_evals += direct.evals;
                        worst = worst.max((table.eval(xm) - direct.value).norm());
                    }
                }
                table.interp_err = worst;
            }
            let real = f.real_valued && f.extra_phase.is_none();
            let mfun = m.clone();
            let table = Arc::new(table);
            let table_for_eval = table.clone();
            let mut prof = RadialProfile::analytic(
                d,
                (rho_lo, rho_hi),
                0.0,
                real,
                Arc::new(move |rho| table_for_eval.eval(rho) * mfun.eval(rho * rho)),
            );
            prof.split_points = m.splits_rho.clone();
            // sample quadrature error, cubic interpolation error, and an
            // aliasing bound where the grid was kept coarse (off the
            // instantaneous-frequency band of a chirp)
            prof.interp_err = worst_err
                + table.interp_err
                + if aliasing_guard { 0.25 * coarse_max } else { 0.0 };
            prof
        }
    };

    Ok(PreparedMultiplier {
        integrand,
        dim: d,
        prep_evals,
    })
}

impl PreparedMultiplier {
    /// m(-Delta) f evaluated at |x| = x_mag.
    pub fn apply(&self, x_mag: f64, tol: f64) -> Result<QuadResult> {
        let mut r = radial_fourier(&self.integrand, self.dim, x_mag, tol)?;
        r.evals += self.prep_evals;
        Ok(r)
    }
}

/// One-shot m(-Delta) f (x).
pub fn apply_multiplier(
    m: &RadialMultiplier,
    f: &RadialProfile,
    d: u32,
    x_mag: f64,
    tol: f64,
) -> Result<QuadResult> {
    prepare_multiplier(m, f, d, tol)?.apply(x_mag, tol)
}

/// Bochner-Riesz kernel K_t^delta(x) = t^d int (1-|xi|^2)_+^delta
/// e^{i t <x, xi>} dxi, computed as t^d K_1^delta(t |x|).
pub fn br_kernel(d: u32, delta: f64, t: f64, x_mag: f64, tol: f64) -> Result<QuadResult> {
    if !(t > 0.0) || !(delta >= 0.0) {
        return Err(Error::InvalidParam(
            "br_kernel: need t > 0 and delta >= 0".into(),
        ));
    }
    let unit = RadialProfile::analytic_real(
        d,
        (0.0, 1.0),
        0.0,
        Arc::new(move |rho| {
            let u = 1.0 - rho * rho;
            if u <= 0.0 {
                0.0
            } else {
                u.powf(delta)
            }
        }),
    );
    let td = t.powf(d as f64);
    Ok(radial_fourier(&unit, d, t * x_mag, tol)?.scale(Complex64::new(td, 0.0)))
}

/// Bochner-Riesz mean S_t^delta f (x) via the multiplier route.
pub fn br_mean(
    f: &RadialProfile,
    d: u32,
    delta: f64,
    t: f64,
    x_mag: f64,
    tol: f64,
) -> Result<QuadResult> {
    apply_multiplier(&br_multiplier(delta, t), f, d, x_mag, tol)
}
