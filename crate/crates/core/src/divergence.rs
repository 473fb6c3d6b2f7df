//! The divergence experiment: spectral windows Psi_j applied to the family
//! members through the polar Bessel formula, the cosine-selected sets A_j on
//! the unit annulus, ratio sweeps against the predicted power of
//! eps N^{1/2}, cross-term separation, and the blow-up trajectory.
//!
//! Polar route (the dedicated formula, cross-checked against the generic
//! multiplier machinery):
//!   Psi_j(-Delta) f_j (x) = (2 pi)^{-d/2} |x|^{(2-d)/2}
//!       int Psi_j(r^2) F_j(r) J_{(d-2)/2}(r |x|) r^{d/2} dr.
//!
//! The cosine phase offset is (d-1) pi / 4, as dictated by the
//! large-argument form J_m(z) ~ sqrt(2/(pi z)) cos(z - m pi/2 - pi/4) at
//! m = (d-2)/2.

use crate::error::{Error, Result};
use crate::family::FamilyMember;
use crate::fit::{log_log_fit, ExponentFit};
use crate::multiplier::{apply_multiplier, RadialMultiplier};
use crate::params::{critical_index, Exponent, Params};
use crate::profiles::{BumpSpec, SchwartzProfile};
use crate::quad::{integrate_adaptive, QuadResult};
use crate::special::{bessel_asymptotic_leading, bessel_j, sphere_area};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselMode {
    Exact,
    LeadingAsymptotic,
}

/// Radial support of Psi_j(r^2) F_j(r): |r^2 - N| < 2 N eps.
fn window_radii(n: f64, eps: f64) -> (f64, f64) {
    ((n * (1.0 - 2.0 * eps)).max(0.0).sqrt(), (n * (1.0 + 2.0 * eps)).sqrt())
}

/// Psi_j(-Delta) f_j (x) by the polar formula.
pub fn spectral_apply(
    member: &FamilyMember,
    eta: &BumpSpec,
    x_mag: f64,
    mode: BesselMode,
    tol: f64,
) -> Result<QuadResult> {
    spectral_apply_pair(member, member, eta, x_mag, mode, tol)
}

/// Psi_j(-Delta) f_k (x): the window from `window_member`, the profile from
/// `profile_member` (j = k gives the diagonal term).
pub fn spectral_apply_pair(
    window_member: &FamilyMember,
    profile_member: &FamilyMember,
    eta: &BumpSpec,
    x_mag: f64,
    mode: BesselMode,
    tol: f64,
) -> Result<QuadResult> {
    let pw = window_member.params;
    let d = pw.d;
    let df = d as f64;
    let m = (df - 2.0) / 2.0;
    let (nw, ew) = (pw.n(), pw.epsilon);
    let (r_lo, r_hi) = window_radii(nw, ew);
    if !(x_mag > 0.0) {
        return Err(Error::InvalidParam("spectral_apply: need |x| > 0".into()));
    }
    let r = integrate_adaptive(
        |r| {
            let window = eta.eval((r * r - nw) / (nw * ew));
            if window == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let bessel = match mode {
                BesselMode::Exact => bessel_j(m, r * x_mag).unwrap_or(f64::NAN),
                BesselMode::LeadingAsymptotic => {
                    bessel_asymptotic_leading(m, r * x_mag).unwrap_or(f64::NAN)
                }
            };
            Complex64::new(
                window * profile_member.f_eps_freq(r) * bessel * r.powf(df / 2.0),
                0.0,
            )
        },
        r_lo,
        r_hi,
        tol,
    )?;
    let front = (2.0 * PI).powf(-df / 2.0) * x_mag.powf((2.0 - df) / 2.0);
    Ok(r.scale(Complex64::new(front, 0.0)))
}

/// Independent route: the generic multiplier machinery with m = Psi_j.
pub fn spectral_apply_multiplier_route(
    member: &FamilyMember,
    eta: &BumpSpec,
    x_mag: f64,
    tol: f64,
) -> Result<QuadResult> {
    let p = member.params;
    let (n, eps) = (p.n(), p.epsilon);
    let e = eta.clone();
    let mult = RadialMultiplier::new(
        Arc::new(move |s| e.eval((s - n) / (n * eps))),
        (n * (1.0 - 2.0 * eps), n * (1.0 + 2.0 * eps)),
    );
    apply_multiplier(&mult, member.spatial_profile(), p.d, x_mag, tol)
}

/// The cosine-selected radial set inside the annulus 1/2 <= |x| <= 2.
#[derive(Debug, Clone)]
pub struct SetA {
    pub n_val: f64,
    pub d: u32,
    /// Radial intervals where cos(sqrt(N) x - (d-1) pi/4) > 1/2.
    pub intervals: Vec<(f64, f64)>,
    /// d-dimensional measure of the set.
    pub measure: f64,
    /// Measure of the ambient annulus.
    pub annulus_measure: f64,
}

impl SetA {
    pub fn fraction(&self) -> f64 {
        self.measure / self.annulus_measure
    }
}

/// Solve the cosine condition exactly into radial intervals.
pub fn set_a(n_val: f64, d: u32) -> SetA {
    set_a_with_margin(n_val, d, 0.5)
}

pub fn set_a_with_margin(n_val: f64, d: u32, cos_margin: f64) -> SetA {
    let sqrt_n = n_val.sqrt();
    let theta0 = (d as f64 - 1.0) * PI / 4.0;
    let half_width = cos_margin.acos();
    let (lo, hi) = (0.5f64, 2.0f64);
    let mut intervals = Vec::new();
    let l_min = ((sqrt_n * lo - theta0 - half_width) / (2.0 * PI)).floor() as i64 - 1;
    let l_max = ((sqrt_n * hi - theta0 + half_width) / (2.0 * PI)).ceil() as i64 + 1;
    for l in l_min..=l_max {
        let centre = (theta0 + 2.0 * PI * l as f64) / sqrt_n;
        let a = (centre - half_width / sqrt_n).max(lo);
        let b = (centre + half_width / sqrt_n).min(hi);
        if b > a {
            intervals.push((a, b));
        }
    }
    let df = d as f64;
    let shell = |a: f64, b: f64| sphere_area(d) * (b.powf(df) - a.powf(df)) / df;
    let measure = intervals.iter().map(|&(a, b)| shell(a, b)).sum();
    SetA {
        n_val,
        d,
        intervals,
        measure,
        annulus_measure: shell(lo, hi),
    }
}

/// Deterministic sample radii: midpoints of the margin-tightened intervals.
pub fn set_a_samples(n_val: f64, d: u32, cos_margin: f64, max_points: usize) -> Vec<f64> {
    let tight = set_a_with_margin(n_val, d, cos_margin);
    let mut xs: Vec<f64> = tight
        .intervals
        .iter()
        .map(|&(a, b)| 0.5 * (a + b))
        .collect();
    if xs.len() > max_points {
        let stride = xs.len() as f64 / max_points as f64;
        xs = (0..max_points)
            .map(|i| xs[(i as f64 * stride) as usize])
            .collect();
    }
    xs
}

#[derive(Debug, Clone)]
pub struct DivergenceSample {
    pub x: f64,
    pub value: f64,
    pub norm: f64,
    pub ratio: f64,
    pub predicted_scale: f64,
}

/// |Psi_j(-Delta) f_j (x)| / ||f_j||_p alongside (eps N^{1/2})^{-delta(d,p)}.
pub fn divergence_ratio(
    member: &FamilyMember,
    eta: &BumpSpec,
    x_mag: f64,
    tol: f64,
) -> Result<DivergenceSample> {
    let p = member.params;
    let value = spectral_apply(member, eta, x_mag, BesselMode::Exact, tol)?
        .value
        .norm();
    let norm = member.lp_norm(p.p)?;
    let dc = critical_index(p.d, p.p)?;
    let predicted_scale = (p.epsilon * p.n().sqrt()).powf(-dc);
    Ok(DivergenceSample {
        x: x_mag,
        value,
        norm,
        ratio: value / norm,
        predicted_scale,
    })
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub eps: f64,
    pub n_val: f64,
    pub best_ratio: f64,
    pub predicted_scale: f64,
    pub x_best: f64,
}

/// Fit log(max_{x in A} ratio) against log(eps N^{1/2}); expected slope
/// -delta(d, p).
pub fn exponent_sweep(
    eps_grid: &[f64],
    d: u32,
    p: Exponent,
    gamma: f64,
    psi: &Arc<SchwartzProfile>,
    eta: &BumpSpec,
) -> Result<(ExponentFit, Vec<SweepRow>)> {
    if eps_grid.len() < 5 {
        return Err(Error::DegenerateFit("need >= 5 eps points".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut rows = Vec::new();
    for &eps in eps_grid {
        let params = Params::new(d, p, 0.0, gamma, eps)?;
        let member = FamilyMember::new(params, psi.clone())?;
        let n_val = params.n();
        let samples = set_a_samples(n_val, d, 0.55, 12);
        let mut best = DivergenceSample {
            x: f64::NAN,
            value: 0.0,
            norm: f64::NAN,
            ratio: 0.0,
            predicted_scale: f64::NAN,
        };
        for &x in &samples {
            let s = divergence_ratio(&member, eta, x, 1e-8)?;
            if s.ratio > best.ratio {
                best = s;
            }
        }
        xs.push(eps * n_val.sqrt());
        ys.push(best.ratio);
        rows.push(SweepRow {
            eps,
            n_val,
            best_ratio: best.ratio,
            predicted_scale: best.predicted_scale,
            x_best: best.x,
        });
    }
    Ok((log_log_fit(&xs, &ys)?, rows))
}

/// (|Psi_j(-Delta) f_k|, |Psi_j(-Delta) f_j|) at x; k != j probes the
/// window/support separation along the schedule.
#[allow(clippy::too_many_arguments)]
pub fn cross_term(
    j: u32,
    k: u32,
    d: u32,
    p: Exponent,
    delta: f64,
    gamma: f64,
    psi: &Arc<SchwartzProfile>,
    eta: &BumpSpec,
    x_mag: f64,
) -> Result<(f64, f64)> {
    let mj = FamilyMember::from_schedule(d, p, delta, gamma, j, psi.clone())?;
    let mk = FamilyMember::from_schedule(d, p, delta, gamma, k, psi.clone())?;
    let cross = spectral_apply_pair(&mj, &mk, eta, x_mag, BesselMode::Exact, 1e-9)?;
    let diag = spectral_apply(&mj, eta, x_mag, BesselMode::Exact, 1e-9)?;
    Ok((cross.value.norm(), diag.value.norm()))
}

#[derive(Debug, Clone)]
pub struct BlowupTerm {
    pub j: u32,
    pub eps: f64,
    /// Closed form T_j = 2^{-j} eps_j^sigma.
    pub closed_form: f64,
    /// eps_j^delta |Psi_j(-Delta) sum_partial (x_j)| at the first A_j sample.
    pub numeric: Option<f64>,
}

/// The lower-bound trajectory. Requires sigma < 0; j <= j_max terms, with the
/// numeric counterpart evaluated when `series` is provided.
pub fn blowup_trajectory(
    d: u32,
    p: Exponent,
    delta: f64,
    gamma: f64,
    j_max: u32,
    numeric: Option<(&Arc<SchwartzProfile>, &BumpSpec)>,
) -> Result<Vec<BlowupTerm>> {
    let rep = crate::params::sigma(d, p, delta, gamma)?;
    if rep.sigma >= 0.0 {
        return Err(Error::SigmaNonNegative {
            sigma: rep.sigma,
            gamma_max: rep.gamma_max.unwrap_or(f64::NAN),
        });
    }
    let mut members: Vec<FamilyMember> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    if let Some((psi, _)) = numeric {
        for j in 0..=j_max {
            let m = FamilyMember::from_schedule(d, p, delta, gamma, j, psi.clone())?;
            let w = 0.5f64.powi(j as i32) / m.lp_norm(p)?;
            members.push(m);
            weights.push(w);
        }
    }
    let mut out = Vec::new();
    for j in 0..=j_max {
        // closed form is pure arithmetic: it continues past the numeric
        // precision ceiling (which only binds the quadrature-based terms)
        let (eps, n_val) = crate::params::schedule_with_ceiling(j, gamma, 40)?;
        let closed_form = 0.5f64.powi(j as i32) * eps.powf(rep.sigma);
        let numeric_val = match numeric {
            Some((_, eta)) if (j as usize) < members.len() => {
                let xs = set_a_samples(n_val, d, 0.55, 1);
                let x = *xs.first().ok_or_else(|| {
                    Error::InvalidParam(format!("empty A_j sample set at j = {j}"))
                })?;
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, &w) in members.iter().zip(&weights) {
                    let term =
                        spectral_apply_pair(&members[j as usize], m, eta, x, BesselMode::Exact, 1e-9)?;
                    acc += term.value * w;
                }
                Some(eps.powf(delta) * acc.norm())
            }
            _ => None,
        };
        out.push(BlowupTerm {
            j,
            eps,
            closed_form,
            numeric: numeric_val,
        });
    }
    Ok(out)
}
