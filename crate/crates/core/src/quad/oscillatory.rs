//! Filon-type integration of int a(t) e^{i phi(t)} dt with analytic phase.
//!
//! Strategy: slow phases go straight to the adaptive rule; otherwise the
//! interval is split at stationary points of phi (isolated into small windows
//! handled adaptively, where Van der Corput-type behaviour lives) and the
//! remaining segments are covered by Filon panels. On each panel the phase is
//! modelled linearly between the endpoints, the residual e^{i(phi - lin)} is
//! folded into the amplitude, and the amplitude polynomial (degree 12 on
//! Chebyshev-Lobatto nodes) is integrated against e^{i kappa u} with exact
//! moments. Panels bisect until the nested degree-6 estimate agrees.
//!
//! `err_estimate` is relative to the amplitude scale of the integral: for
//! heavily cancelling integrals it reports the honest noise floor rather
//! than chasing an unattainable relative target.

use super::adaptive::integrate_adaptive_opts;
use super::{QuadOptions, QuadResult};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

pub(crate) const NODES: usize = 13; // degree-12 panels; the degree-6 subset is nested
const LIN_DEV_MAX: f64 = 0.7; // radians of allowed midpoint phase deviation
const ISOLATION_PHASE: f64 = 15.0; // radians captured by a stationary window
const SLOW_BUDGET: f64 = 50.0; // total phase variation handled adaptively

#[derive(Debug, Clone)]
pub struct OscOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Relative noise density of the amplitude (interpolation error of a
    /// sampled profile): panel targets floor at amp_rel_floor * panel mass.
    pub amp_rel_floor: f64,
    pub split_points: Vec<f64>,
    /// Known stationary points of the phase inside (a, b). `Some(vec)` skips
    /// the sign-change scan (pass an empty vec for a monotone phase); `None`
    /// requests detection by scanning the phase derivative.
    pub stationary_hint: Option<Vec<f64>>,
}

impl Default for OscOptions {
    fn default() -> Self {
        OscOptions {
            rel_tol: 1e-9,
            abs_tol: 1e-300,
            max_panels: 200_000,
            amp_rel_floor: 0.0,
            split_points: Vec::new(),
            stationary_hint: None,
        }
    }
}

impl OscOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        OscOptions {
            rel_tol,
            ..Default::default()
        }
    }
}

struct Accum {
    value: Complex64,
    err: f64,
    resabs: f64,
    evals: usize,
    panels: usize,
}

/// Integrate amplitude(t) * exp(i * phase(t)) over [a, b].
pub fn integrate_oscillatory(
    amplitude: impl Fn(f64) -> Complex64,
    phase: impl Fn(f64) -> f64,
    phase_deriv: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadResult> {
    integrate_oscillatory_opts(amplitude, phase, phase_deriv, a, b, &OscOptions::with_tol(tol))
}

pub fn integrate_oscillatory_opts(
    amplitude: impl Fn(f64) -> Complex64,
    phase: impl Fn(f64) -> f64,
    phase_deriv: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    opts: &OscOptions,
) -> Result<QuadResult> {
    if !(a < b) {
        return Err(Error::InvalidParam(format!(
            "integrate_oscillatory: need a < b, got [{a}, {b}]"
        )));
    }

    // Scan the phase derivative: total variation and (unless hinted)
    // sign changes locating stationary points.
    let scan: usize = if opts.stationary_hint.is_some() { 32 } else { 256 };
    let h = (b - a) / scan as f64;
    let mut variation = 0.0;
    let mut amp_l1 = 0.0;
    let mut sign_changes: Vec<(f64, f64)> = Vec::new();
    let mut prev_t = a;
    let mut prev_dp = phase_deriv(a);
    for i in 1..=scan {
        let t = a + i as f64 * h;
        let dp = phase_deriv(t);
        variation += 0.5 * (dp.abs() + prev_dp.abs()) * h;
        amp_l1 += amplitude(t - 0.5 * h).norm() * h;
        if opts.stationary_hint.is_none() && (prev_dp == 0.0 || (prev_dp < 0.0) != (dp < 0.0)) {
            sign_changes.push((prev_t, t));
        }
        prev_t = t;
        prev_dp = dp;
    }
    let evals_scan = 2 * scan + 2;

    let quad_opts = QuadOptions {
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        max_intervals: 4000,
        split_points: opts.split_points.clone(),
        rel_noise: opts.amp_rel_floor,
    };

    if variation <= SLOW_BUDGET {
        let mut r = integrate_adaptive_opts(
            |t| amplitude(t) * Complex64::from_polar(1.0, phase(t)),
            a,
            b,
            &quad_opts,
        )
        .or_else(recover_best)?;
        r.evals += evals_scan;
        return Ok(r);
    }

    if sign_changes.len() > 16 {
        return Err(Error::StationaryPoints {
            context: "integrate_oscillatory".into(),
            detail: format!("{} sign changes of phase derivative in scan", sign_changes.len()),
        });
    }

    // Stationary points: from the hint, or refined by bisection.
    let mut stationary = match &opts.stationary_hint {
        Some(hint) => {
            let mut v: Vec<f64> = hint.iter().copied().filter(|&t| t > a && t < b).collect();
            v.sort_by(|x, y| x.partial_cmp(y).unwrap());
            v
        }
        None => {
            let mut v = Vec::new();
            for &(mut lo, mut hi) in &sign_changes {
                let mut flo = phase_deriv(lo);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let fm = phase_deriv(mid);
                    if fm == 0.0 {
                        lo = mid;
                        break;
                    }
                    if (flo < 0.0) != (fm < 0.0) {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                v.push(0.5 * (lo + hi));
            }
            v
        }
    };
    stationary.dedup_by(|x, y| (*x - *y).abs() < 1e-14 * (b - a));

    // Breakpoints: stationary isolation windows plus user split points.
    let mut segments: Vec<(f64, f64, bool)> = Vec::new(); // (lo, hi, is_stationary_window)
    let mut cursor = a;
    for (i, &ts) in stationary.iter().enumerate() {
        let left_lim = cursor;
        let right_lim = if i + 1 < stationary.len() {
            0.5 * (ts + stationary[i + 1])
        } else {
            b
        };
        let phi_s = phase(ts);
        let grow = |dir: f64| -> f64 {
            let mut w = (b - a) * 1e-7;
            while w < (b - a) {
                let t = (ts + dir * w).clamp(left_lim, right_lim);
                if (phase(t) - phi_s).abs() >= ISOLATION_PHASE
                    || t == left_lim
                    || t == right_lim
                {
                    return w;
                }
                w *= 2.0;
            }
            b - a
        };
        let wlo = grow(-1.0);
        let whi = grow(1.0);
        let lo = (ts - wlo).clamp(left_lim, right_lim);
        let hi = (ts + whi).clamp(left_lim, right_lim);
        if lo > cursor {
            segments.push((cursor, lo, false));
        }
        segments.push((lo, hi, true));
        cursor = hi;
    }
    if cursor < b {
        segments.push((cursor, b, false));
    }

    // Honor user split points by subdividing segments.
    if !opts.split_points.is_empty() {
        let mut split = Vec::new();
        for (lo, hi, sw) in segments {
            let mut cuts: Vec<f64> = opts
                .split_points
                .iter()
                .copied()
                .filter(|&p| p > lo && p < hi)
                .collect();
            cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let mut last = lo;
            for c in cuts {
                split.push((last, c, sw));
                last = c;
            }
            split.push((last, hi, sw));
        }
        segments = split;
    }

    let mut acc = Accum {
        value: Complex64::new(0.0, 0.0),
        err: 0.0,
        resabs: 0.0,
        evals: evals_scan,
        panels: 0,
    };

    // Crude magnitude guess to apportion panel budgets: the non-stationary
    // heuristic amp_l1 / (1 + V/2pi), raised by the stationary-phase
    // contribution amp(t*) sqrt(2 pi / |phi''(t*)|) at each stationary point.
    // The cancellation noise floor eps * integral(|amp|) is unbeatable in
    // f64, so never target below it.
    let mut scale_guess = (amp_l1 / (1.0 + variation / (2.0 * PI))).max(1e-300);
    for &ts in &stationary {
        let hs = 1e-4 * (b - a);
        let ddp = (phase_deriv((ts + hs).min(b)) - phase_deriv((ts - hs).max(a))) / (2.0 * hs);
        if ddp.abs() > 0.0 {
            let contrib = amplitude(ts).norm() * (2.0 * PI / ddp.abs()).sqrt();
            scale_guess = scale_guess.max(contrib);
        }
    }
    let abs_target = opts
        .abs_tol
        .max(opts.rel_tol * scale_guess)
        .max((4.0 * f64::EPSILON + opts.amp_rel_floor) * amp_l1);

    for &(lo, hi, stationary_window) in &segments {
        if hi <= lo {
            continue;
        }
        let budget = abs_target * ((hi - lo) / (b - a)).max(1e-3);
        if stationary_window {
            let sub = QuadOptions {
                rel_tol: opts.rel_tol,
                abs_tol: budget,
                max_intervals: 4000,
                split_points: Vec::new(),
                rel_noise: opts.amp_rel_floor,
            };
            let r = integrate_adaptive_opts(
                |t| amplitude(t) * Complex64::from_polar(1.0, phase(t)),
                lo,
                hi,
                &sub,
            )
            .or_else(recover_best)?;
            acc.value += r.value;
            acc.err += r.err_estimate;
            acc.evals += r.evals;
        } else {
            filon_segment(&amplitude, &phase, lo, hi, budget, 0, f64::INFINITY, &mut acc, opts)?;
        }
    }

    acc.err += (f64::EPSILON + opts.amp_rel_floor) * acc.resabs;
    Ok(QuadResult {
        value: acc.value,
        err_estimate: acc.err,
        evals: acc.evals,
    })
}

fn recover_best(e: Error) -> Result<QuadResult> {
    match e.best_estimate() {
        Some((value, err)) => Ok(QuadResult {
            value,
            err_estimate: err,
            evals: 0,
        }),
        None => Err(e),
    }
}

#[allow(clippy::too_many_arguments)]
fn filon_segment(
    amplitude: &impl Fn(f64) -> Complex64,
    phase: &impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    budget: f64,
    depth: usize,
    parent_err: f64,
    acc: &mut Accum,
    opts: &OscOptions,
) -> Result<()> {
    let mid = 0.5 * (lo + hi);
    let (plo, pmid, phi) = (phase(lo), phase(mid), phase(hi));
    let lin_dev = (pmid - 0.5 * (plo + phi)).abs();
    acc.evals += 3;
    let may_split = depth < 60 && acc.panels < opts.max_panels;

    if lin_dev > LIN_DEV_MAX && may_split {
        filon_segment(amplitude, phase, lo, mid, 0.5 * budget, depth + 1, f64::INFINITY, acc, opts)?;
        filon_segment(amplitude, phase, mid, hi, 0.5 * budget, depth + 1, f64::INFINITY, acc, opts)?;
        return Ok(());
    }

    let (value, mut err, resabs, noise) = filon_panel(amplitude, phase, lo, hi, plo, phi);
    acc.evals += NODES;
    acc.panels += 1;

    // Smooth convergence shrinks the nested estimate by orders of magnitude
    // per level; an error merely halving with the width while already at
    // roundoff magnitude relative to the panel mass is the plateau where
    // further splitting cannot help. Errors still large against the panel
    // mass (unresolved amplitude structure) must keep splitting.
    let stalled = depth >= 4 && err > 0.4 * parent_err && err <= 1e-8 * resabs;

    if err > budget.max(noise).max(opts.amp_rel_floor * resabs) && may_split && !stalled {
        filon_segment(amplitude, phase, lo, mid, 0.5 * budget, depth + 1, err, acc, opts)?;
        filon_segment(amplitude, phase, mid, hi, 0.5 * budget, depth + 1, err, acc, opts)?;
        return Ok(());
    }
    err = err.max(noise);

    // A panel force-accepted with a badly nonlinear phase tells us nothing:
    // report its full amplitude mass as the uncertainty.
    if lin_dev > LIN_DEV_MAX {
        err = err.max(resabs);
    }

    acc.value += value;
    acc.err += err;
    acc.resabs += resabs;
    Ok(())
}

/// One Filon panel: degree-12 interpolation of the slow part against exact
/// linear-phase moments, with the nested degree-6 result as error estimate.
fn filon_panel(
    amplitude: &impl Fn(f64) -> Complex64,
    phase: &impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    plo: f64,
    phi: f64,
) -> (Complex64, f64, f64, f64) {
    let hh = 0.5 * (hi - lo);
    let mid = 0.5 * (lo + hi);
    let kappa = 0.5 * (phi - plo);
    let pavg = 0.5 * (phi + plo);

    // Chebyshev-Lobatto nodes, u_i = cos(i pi / 12), i = 0..12 (descending).
    let mut us = [0.0f64; NODES];
    let mut gs = [Complex64::new(0.0, 0.0); NODES];
    let mut resabs = 0.0;
    for i in 0..NODES {
        let u = (PI * i as f64 / (NODES - 1) as f64).cos();
        let t = mid + hh * u;
        let residual = phase(t) - (pavg + kappa * u);
        let g = amplitude(t) * Complex64::from_polar(1.0, residual);
        us[i] = u;
        gs[i] = g;
        resabs += g.norm();
    }
    resabs *= 2.0 * hh / NODES as f64;
    if hh <= 0.0 || mid - hh >= mid || mid + hh <= mid {
        // Panel at floating-point resolution.
        return (Complex64::new(0.0, 0.0), resabs, resabs, resabs);
    }

    let moments = linear_phase_moments(kappa);

    let (full, contraction_l1) = poly_vs_moments(&us, &gs, &moments);
    // Nested degree-6 subset: every other node.
    let mut us7 = [0.0f64; 7];
    let mut gs7 = [Complex64::new(0.0, 0.0); 7];
    for i in 0..7 {
        us7[i] = us[2 * i];
        gs7[i] = gs[2 * i];
    }
    let (coarse, _) = poly_vs_moments(&us7, &gs7, &moments);

    let prefactor = Complex64::from_polar(hh, pavg);
    let value = prefactor * full;
    let err = (full - coarse).norm() * hh;
    // Roundoff floor of the contraction: the divided-difference/monomial
    // pipeline works at this magnitude regardless of cancellation in `full`.
    let noise = 60.0 * f64::EPSILON * contraction_l1 * hh;
    (value, err, resabs, noise)
}

/// Monomial coefficients of the interpolating polynomial through (us, gs),
/// via Newton divided differences and synthetic multiplication.
pub(crate) fn poly_coeffs(us: &[f64], gs: &[Complex64]) -> Vec<Complex64> {
    let n = us.len();
    let mut dd: Vec<Complex64> = gs.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (us[i] - us[i - level]);
        }
    }
    let mut coeff = vec![Complex64::new(0.0, 0.0); n];
    coeff[0] = dd[n - 1];
    let mut deg = 0usize;
    for i in (0..n - 1).rev() {
        // coeff <- coeff * (u - us[i]) + dd[i]
        for k in (0..=deg).rev() {
            let c = coeff[k];
            coeff[k + 1] += c;
            coeff[k] = -us[i] * c;
        }
        deg += 1;
        coeff[0] += dd[i];
    }
    coeff
}

/// Interpolate values on the given nodes and contract the monomial
/// coefficients with the moments; also return the L1 mass of the
/// contraction (its roundoff scale).
fn poly_vs_moments(us: &[f64], gs: &[Complex64], moments: &[Complex64]) -> (Complex64, f64) {
    let coeff = poly_coeffs(us, gs);
    let mut out = Complex64::new(0.0, 0.0);
    let mut l1 = 0.0;
    for (k, c) in coeff.iter().enumerate() {
        out += c * moments[k];
        l1 += c.norm() * moments[k].norm();
    }
    (out, l1)
}

/// Moments int_{-1}^{1} u^k e^{i kappa u} du for k = 0..12.
pub(crate) fn linear_phase_moments(kappa: f64) -> [Complex64; NODES] {
    let mut m = [Complex64::new(0.0, 0.0); NODES];
    if kappa.abs() >= 14.0 {
        // Forward recurrence is stable here (amplification k/kappa < 1).
        let eik = Complex64::from_polar(1.0, kappa);
        let emik = Complex64::from_polar(1.0, -kappa);
        let ik = Complex64::new(0.0, kappa);
        m[0] = (eik - emik) / ik;
        for k in 1..NODES {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            m[k] = (eik - sign * emik) / ik - (k as f64 / ik) * m[k - 1];
        }
    } else {
        // Power series in kappa.
        for (k, slot) in m.iter_mut().enumerate() {
            let mut term = Complex64::new(1.0, 0.0); // (i kappa)^j / j!
            let mut sum = Complex64::new(0.0, 0.0);
            let mut j = 0usize;
            loop {
                if (k + j) % 2 == 0 {
                    sum += term * (2.0 / (k + j + 1) as f64);
                }
                j += 1;
                term *= Complex64::new(0.0, kappa) / j as f64;
                if term.norm() < 1e-20 && j > 4 {
                    break;
                }
            }
            *slot = sum;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_phase_exact() {
        // amp = 1, phase = 100 t on [0,1]: exact (e^{100i} - 1)/(100 i)
        let r = integrate_oscillatory(
            |_| Complex64::new(1.0, 0.0),
            |t| 100.0 * t,
            |_| 100.0,
            0.0,
            1.0,
            1e-10,
        )
        .unwrap();
        let exact = (Complex64::from_polar(1.0, 100.0) - 1.0) / Complex64::new(0.0, 100.0);
        assert!((r.value - exact).norm() < 1e-11, "{:?} vs {exact}", r.value);
    }

    #[test]
    fn zero_phase_reduces_to_adaptive() {
        let r = integrate_oscillatory(
            |_| Complex64::new(1.0, 0.0),
            |_| 0.0,
            |_| 0.0,
            0.0,
            1.0,
            1e-12,
        )
        .unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-12);
        assert!(r.value.im.abs() < 1e-14);
    }

    #[test]
    fn high_frequency_gaussian_amplitude() {
        // int e^{-t^2} e^{i w t} dt over [-8, 8] ~ sqrt(pi) e^{-w^2/4}... too
        // small at w = 300 to check relатively; use w = 40:
        // exact = sqrt(pi) e^{-400/4} no; w=8: e^{-16} ~ 1.1e-7 * sqrt(pi)
        let w = 8.0;
        let r = integrate_oscillatory(
            |t| Complex64::new((-t * t).exp(), 0.0),
            |t| w * t,
            |_| w,
            -8.0,
            8.0,
            1e-10,
        )
        .unwrap();
        let exact = PI.sqrt() * (-w * w / 4.0).exp();
        assert!(
            (r.value.re - exact).abs() < 1e-9 * exact.abs().max(1e-4),
            "{} vs {}",
            r.value.re,
            exact
        );
    }

    #[test]
    fn stationary_point_fresnel() {
        // int_{-20}^{20} e^{i t^2} dt -> sqrt(pi) e^{i pi/4} as limits grow;
        // compare against adaptive reference on the same interval.
        let reference = crate::quad::integrate_adaptive(
            |t| Complex64::from_polar(1.0, t * t),
            -20.0,
            20.0,
            1e-12,
        )
        .unwrap();
        let r = integrate_oscillatory(
            |_| Complex64::new(1.0, 0.0),
            |t| t * t,
            |t| 2.0 * t,
            -20.0,
            20.0,
            1e-9,
        )
        .unwrap();
        assert!(
            (r.value - reference.value).norm() < 5e-8,
            "{:?} vs {:?}",
            r.value,
            reference.value
        );
    }

    #[test]
    fn reciprocal_phase_vs_brute_force() {
        // The f_eps-type phase: omega (t + 1/t) on [1/4, 2], amp t^{-1}.
        // Stationary point at t = 1.
        let omega = 200.0;
        let amp = |t: f64| Complex64::new(1.0 / t, 0.0);
        let ph = move |t: f64| omega * (t + 1.0 / t);
        let dph = move |t: f64| omega * (1.0 - 1.0 / (t * t));
        let r = integrate_oscillatory(amp, ph, dph, 0.25, 2.0, 1e-9).unwrap();
        // Brute force: dense adaptive with many intervals.
        let brute = integrate_adaptive_opts(
            |t| Complex64::from_polar(1.0 / t, omega * (t + 1.0 / t)),
            0.25,
            2.0,
            &QuadOptions {
                rel_tol: 1e-12,
                max_intervals: 200_000,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(
            (r.value - brute.value).norm() < 1e-6 * brute.value.norm(),
            "filon {:?} vs brute {:?}",
            r.value,
            brute.value
        );
    }

    #[test]
    fn moments_match_adaptive() {
        for &kappa in &[0.0, 0.5, 5.0, 13.9, 14.1, 40.0, 500.0] {
            let m = linear_phase_moments(kappa);
            for k in [0usize, 3, 7, 12] {
                let direct = crate::quad::integrate_adaptive(
                    |u| Complex64::from_polar(1.0, kappa * u) * u.powi(k as i32),
                    -1.0,
                    1.0,
                    1e-11,
                )
                .unwrap();
                assert!(
                    (m[k] - direct.value).norm() < 1e-11,
                    "kappa={kappa} k={k}: {} vs {}",
                    m[k],
                    direct.value
                );
            }
        }
    }
}
