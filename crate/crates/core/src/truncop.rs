//! Truncated Bochner-Riesz means: the input is premultiplied by a dilated
//! radial cutoff phi(2^{-k} .) before the mean is applied, realizing the
//! improper-integral definition of S_t^delta on slowly decaying inputs.
//!
//! Everything is computed frequency-side (cutoff product, then two radial
//! transforms); spatial-convolution oracles validating this path live in the
//! integration tests.

use crate::error::Result;
use crate::family::SeriesPartial;
use crate::fit::{log_log_fit, ExponentFit};
use crate::multiplier::br_mean;
use crate::params::{regime, Regime};
use crate::profiles::DyadicPartition;
use crate::quad::QuadResult;
use crate::radial::{RadialPhase, RadialProfile};
use num_complex::Complex64;
use std::sync::Arc;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffKind {
    Ball,
    Annular,
}

/// Radial cutoff profile phi with exact support metadata; dilated copies
/// phi(2^{-k} .) define the truncation.
#[derive(Clone)]
pub struct RadialCutoff {
    pub kind: CutoffKind,
    eval: RealFn,
    /// Support of the unscaled cutoff in r.
    pub support: (f64, f64),
    /// The cutoff equals 1 on [0, plateau_hi] (ball) or inside the plateau
    /// band (annular).
    pub plateau_hi: f64,
    pub label: &'static str,
}

impl RadialCutoff {
    /// Ball cutoff 1 - theta(r) from the dyadic partition: == 1 on [0, 1/2],
    /// supported in [0, 1). Telescopes exactly against the annular pieces.
    pub fn ball_theta(part: &DyadicPartition) -> Self {
        let p = part.clone();
        RadialCutoff {
            kind: CutoffKind::Ball,
            eval: Arc::new(move |r| 1.0 - p.theta(r)),
            support: (0.0, 1.0),
            plateau_hi: 0.5,
            label: "ball-theta",
        }
    }

    /// Ball cutoff from an explicit bump (structurally different ramp).
    pub fn ball_bump(inner: f64, outer: f64, sharpness: f64) -> Result<Self> {
        let spec = crate::profiles::BumpSpec::ball(inner, outer, sharpness)?;
        let plateau_hi = inner;
        let support = (0.0, outer);
        Ok(RadialCutoff {
            kind: CutoffKind::Ball,
            eval: Arc::new(move |r| spec.eval(r)),
            support,
            plateau_hi,
            label: "ball-bump",
        })
    }

    /// The annular piece chi of the dyadic partition: supported in (1/2, 2).
    pub fn annular_chi(part: &DyadicPartition) -> Self {
        let p = part.clone();
        RadialCutoff {
            kind: CutoffKind::Annular,
            eval: Arc::new(move |r| p.chi(r)),
            support: (0.5, 2.0),
            plateau_hi: 1.0,
            label: "annular-chi",
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r < self.support.0 || r > self.support.1 {
            0.0
        } else {
            (self.eval)(r)
        }
    }
}

/// One truncation: S_t^delta [k, phi].
#[derive(Clone)]
pub struct TruncationSpec {
    pub k: u32,
    pub cutoff: RadialCutoff,
    pub t: f64,
    pub delta: f64,
}

impl TruncationSpec {
    pub fn new(k: u32, cutoff: RadialCutoff, t: f64, delta: f64) -> Self {
        TruncationSpec {
            k,
            cutoff,
            t,
            delta,
        }
    }

    /// The cutoff product g = phi(2^{-k} .) f as a radial profile.
    pub fn apply_cutoff(&self, f: &RadialProfile) -> RadialProfile {
        let scale = (self.k as f64).exp2();
        let (c_lo, c_hi) = (self.cutoff.support.0 * scale, self.cutoff.support.1 * scale);
        let window = match self.cutoff.kind {
            CutoffKind::Ball => (f.window.0, f.window.1.min(c_hi)),
            CutoffKind::Annular => (f.window.0.max(c_lo), f.window.1.min(c_hi)),
        };
        let tail_bound = match self.cutoff.kind {
            // |phi| <= 1, so the product inherits the factor's tail
            CutoffKind::Ball => f.tail_bound,
            CutoffKind::Annular => Some(0.0),
        };
        let cut = self.cutoff.clone();
        let base = f.clone();
        let mut g = RadialProfile::analytic(
            f.dim,
            window,
            tail_bound.unwrap_or(0.0),
            f.real_valued,
            Arc::new(move |r| base.eval_amplitude(r) * cut.eval(r / scale)),
        );
        g.tail_bound = tail_bound;
        g.extra_phase = f.extra_phase.clone();
        g.real_valued = f.real_valued && f.extra_phase.is_none();
        g.interp_err = f.interp_err;
        // Transform sampling must resolve both the profile's own mass scale
        // and the cutoff edge, until the edge is far outside the mass.
        let f_mass = f.mass_radius.unwrap_or(f.window.1);
        g.mass_radius = Some(
            window
                .1
                .min(f_mass.max(c_hi.min(8.0 * f_mass))),
        );
        g
    }
}

/// S_t^delta [k, phi] f (x), frequency-side.
pub fn truncated_mean(
    spec: &TruncationSpec,
    f: &RadialProfile,
    d: u32,
    x_mag: f64,
    tol: f64,
) -> Result<QuadResult> {
    let g = spec.apply_cutoff(f);
    br_mean(&g, d, spec.delta, spec.t, x_mag, tol)
}

/// Nested-exact variant: the forward transform is evaluated per outer
/// quadrature node instead of through a sampled table. Slower, but the
/// error floor is set by quadrature alone, which matters when |S| sits many
/// decades below the input's mass (chirp probes).
pub fn truncated_mean_nested(
    spec: &TruncationSpec,
    f: &RadialProfile,
    d: u32,
    x_mag: f64,
    tol: f64,
) -> Result<QuadResult> {
    use std::sync::atomic::{AtomicU64, Ordering};
    let g = Arc::new(spec.apply_cutoff(f));
    let t = spec.t;
    let delta = spec.delta;
    let inner_err = Arc::new(AtomicU64::new(0));
    let inner_evals = Arc::new(AtomicU64::new(0));
    let h = {
        let g = g.clone();
        let inner_err = inner_err.clone();
        let inner_evals = inner_evals.clone();
        RadialProfile::analytic(
            d,
            (0.0, t),
            0.0,
            false,
            Arc::new(move |rho| {
                let m = {
                    let u = 1.0 - rho * rho / (t * t);
                    if u <= 0.0 {
                        0.0
                    } else {
                        u.powf(delta)
                    }
                };
                if m == 0.0 {
                    return num_complex::Complex64::new(0.0, 0.0);
                }
                match crate::radial::fourier_forward(&g, d, rho, tol) {
                    Ok(r) => {
                        // track the worst inner error estimate
                        let mut cur = inner_err.load(Ordering::Relaxed);
                        while f64::from_bits(cur) < r.err_estimate {
                            match inner_err.compare_exchange(
                                cur,
                                r.err_estimate.to_bits(),
                                Ordering::Relaxed,
                                Ordering::Relaxed,
                            ) {
                                Ok(_) => break,
                                Err(c) => cur = c,
                            }
                        }
                        inner_evals.fetch_add(r.evals as u64, Ordering::Relaxed);
                        r.value * m
                    }
                    Err(_) => num_complex::Complex64::new(f64::NAN, f64::NAN),
                }
            }),
        )
        .with_splits(vec![t])
    };
    let mut out = crate::radial::radial_fourier(&h, d, x_mag, tol)?;
    // the inner error enters the outer integral over the ball of radius t
    let df = d as f64;
    out.err_estimate += f64::from_bits(inner_err.load(std::sync::atomic::Ordering::Relaxed))
        * (2.0 * std::f64::consts::PI).powf(df / 2.0)
        * t.powf(df)
        / df;
    out.evals += inner_evals.load(std::sync::atomic::Ordering::Relaxed) as usize;
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct RegimeRow {
    pub k: u32,
    pub scale: f64,
    pub regime: Regime,
    pub value: f64,
    pub err: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct RegimeReport {
    pub m_order: i32,
    pub rows: Vec<RegimeRow>,
    /// Fitted constant per regime: the smallest C with
    /// value(k) <= C * envelope(k) over the sweep.
    pub c_near: f64,
    pub c_critical: f64,
    pub c_far: f64,
}

/// |S_t^delta[k, chi] f_eps (x)| against the three regime envelopes
///   near:     eps^M (N eps)^{d/2} 2^{kd}
///   critical: N^{-M/2} (N eps)^{d/2} 2^{kd}
///   far:      (N eps 2^{2k})^{-M} (N eps)^{d/2} 2^{kd}
/// with regime classification of 2^k against the critical radius.
#[allow(clippy::too_many_arguments)]
pub fn regime_bound_check(
    member: &crate::family::FamilyMember,
    part: &DyadicPartition,
    delta: f64,
    t: f64,
    m_order: i32,
    x_mag: f64,
    ks: &[u32],
    ratio_threshold: f64,
) -> Result<RegimeReport> {
    let p = member.params;
    let (eps, n, d) = (p.epsilon, p.n(), p.d as f64);
    let neps = n * eps;
    let f = member.spatial_profile();
    let mut rows = Vec::new();
    for &k in ks {
        let spec = TruncationSpec::new(k, RadialCutoff::annular_chi(part), t, delta);
        let r = truncated_mean(&spec, f, p.d, x_mag, 1e-7)?;
        let scale = (k as f64).exp2();
        let reg = regime(scale, eps, p.gamma, ratio_threshold)?;
        let grow = scale.powf(d);
        let bound = match reg {
            Regime::Near => eps.powi(m_order) * neps.powf(d / 2.0) * grow,
            Regime::Critical => n.powf(-m_order as f64 / 2.0) * neps.powf(d / 2.0) * grow,
            Regime::Far => (neps * scale * scale).powi(-m_order) * neps.powf(d / 2.0) * grow,
        };
        let value = r.value.norm();
        rows.push(RegimeRow {
            k,
            scale,
            regime: reg,
            value,
            err: r.err_estimate,
            bound,
            ratio: value / bound,
        });
    }
    let fitted = |reg: Regime| -> f64 {
        rows.iter()
            .filter(|r| r.regime == reg && r.ratio.is_finite())
            .map(|r| r.ratio)
            .fold(f64::NAN, f64::max)
    };
    Ok(RegimeReport {
        m_order,
        c_near: fitted(Regime::Near),
        c_critical: fitted(Regime::Critical),
        c_far: fitted(Regime::Far),
        rows,
    })
}

#[derive(Debug, Clone)]
pub struct WelldefReport {
    pub ks: Vec<u32>,
    pub values_a: Vec<Complex64>,
    pub values_b: Vec<Complex64>,
    pub errs_a: Vec<f64>,
    pub errs_b: Vec<f64>,
    /// Geometric fit of |v_{k+1} - v_k| against k for cutoff a, on the
    /// segment above the combined noise floor.
    pub cauchy_fit: Option<ExponentFit>,
    pub limit_a: Complex64,
    pub limit_b: Complex64,
    pub limit_gap: f64,
    pub combined_err: f64,
}

/// Truncation stability probe: S_t^delta[k, phi] of a normalized partial sum,
/// for two structurally different ball cutoffs over a k-range.
pub fn welldef_probe(
    series: &SeriesPartial,
    delta: f64,
    t: f64,
    x_mag: f64,
    ks: &[u32],
    cutoff_a: &RadialCutoff,
    cutoff_b: &RadialCutoff,
) -> Result<WelldefReport> {
    let mut values_a = Vec::new();
    let mut values_b = Vec::new();
    let mut errs_a = Vec::new();
    let mut errs_b = Vec::new();
    for &k in ks {
        let mut acc = [QuadResult::zero(), QuadResult::zero()];
        for (m, &w) in series.members.iter().zip(&series.weights) {
            let f = m.spatial_profile();
            let d = m.params.d;
            for (slot, cut) in [(0usize, cutoff_a), (1, cutoff_b)] {
                let spec = TruncationSpec::new(k, cut.clone(), t, delta);
                let r = truncated_mean(&spec, f, d, x_mag, 1e-7)?;
                acc[slot] = acc[slot].combine(r.scale(Complex64::new(w, 0.0)));
            }
        }
        values_a.push(acc[0].value);
        errs_a.push(acc[0].err_estimate);
        values_b.push(acc[1].value);
        errs_b.push(acc[1].err_estimate);
    }
    let limit_a = *values_a.last().unwrap();
    let limit_b = *values_b.last().unwrap();
    let combined_err = errs_a.last().unwrap() + errs_b.last().unwrap() + series.tail_bound;

    // Cauchy differences: the deepest differences sit at the noise plateau
    // (the reported error estimates are compounded upper bounds, far above
    // the observed noise); fit the geometric decay on the segment clearly
    // above the plateau.
    let all_diffs: Vec<f64> = (1..values_a.len())
        .map(|i| (values_a[i] - values_a[i - 1]).norm())
        .collect();
    let plateau = all_diffs.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut ks_fit = Vec::new();
    let mut diffs = Vec::new();
    for (i, &diff) in all_diffs.iter().enumerate() {
        if diff > 5.0 * plateau {
            ks_fit.push((ks[i + 1] as f64).exp2());
            diffs.push(diff);
        }
    }
    let cauchy_fit = if ks_fit.len() >= 3 {
        log_log_fit(&ks_fit, &diffs).ok()
    } else {
        None
    };
    Ok(WelldefReport {
        ks: ks.to_vec(),
        values_a,
        values_b,
        errs_a,
        errs_b,
        cauchy_fit,
        limit_a,
        limit_b,
        limit_gap: (limit_a - limit_b).norm(),
        combined_err,
    })
}

/// Which oscillation the truncation probe input carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbePhase {
    /// The quadratic chirp e^{i |y|^2 / 2}: regularity plus fast oscillation.
    Quadratic,
    /// Kernel-resonant oscillation e^{-i t |y|}: matches the Bochner-Riesz
    /// kernel tail frequency, the sharpness witness for K not in L^{p'}.
    Resonant,
    /// No oscillation.
    None,
}

/// Annular truncation sweep of F(|y|) e^{i Phi(y)} for a polynomially
/// decaying envelope F.
#[derive(Debug, Clone)]
pub struct ChirpRow {
    pub k: u32,
    pub magnitude: f64,
    pub err: f64,
    /// Magnitude if certified above the error floor, else 0.
    pub certified: f64,
}

pub fn chirp_truncation_sweep(
    envelope: RealFn,
    phase: ProbePhase,
    d: u32,
    delta: f64,
    t: f64,
    x_mag: f64,
    ks: &[u32],
    part: &DyadicPartition,
) -> Result<Vec<ChirpRow>> {
    let k_hi = *ks.iter().max().unwrap_or(&12);
    let r_max = (k_hi as f64).exp2() * 4.0;
    let base = RadialProfile::analytic(
        d,
        (0.0, r_max),
        0.0,
        phase == ProbePhase::None,
        {
            let env = envelope.clone();
            Arc::new(move |r| Complex64::new(env(r), 0.0))
        },
    );
    let base = match phase {
        ProbePhase::Quadratic => base.with_phase(RadialPhase {
            phase: Arc::new(|r| 0.5 * r * r),
            deriv: Arc::new(|r| r),
            stationary_for: Arc::new(|shift, (lo, hi)| {
                let s = -shift;
                if s > lo && s < hi {
                    vec![s]
                } else {
                    vec![]
                }
            }),
        }),
        ProbePhase::Resonant => {
            let tt = t;
            base.with_phase(RadialPhase {
                phase: Arc::new(move |r| -tt * r),
                deriv: Arc::new(move |_| -tt),
                stationary_for: Arc::new(|_, _| vec![]),
            })
        }
        ProbePhase::None => base,
    };
    let mut rows = Vec::new();
    for &k in ks {
        let spec = TruncationSpec::new(k, RadialCutoff::annular_chi(part), t, delta);
        let r = truncated_mean_nested(&spec, &base, d, x_mag, 1e-7)?;
        let magnitude = r.value.norm();
        let certified = if magnitude > 3.0 * r.err_estimate {
            magnitude
        } else {
            0.0
        };
        rows.push(ChirpRow {
            k,
            magnitude,
            err: r.err_estimate,
            certified,
        });
    }
    Ok(rows)
}

/// Telescoping decomposition: with the theta-ball cutoff,
///   S[K, ball] f = S(chi_lower f) + sum_{n = base}^{K-1} S[n, chi] f
/// exactly; both sides are computed numerically and returned.
pub fn annular_decomposition_check(
    f: &RadialProfile,
    d: u32,
    delta: f64,
    t: f64,
    x_mag: f64,
    part: &DyadicPartition,
    k_hi: u32,
    tol: f64,
) -> Result<(QuadResult, QuadResult)> {
    let lhs = truncated_mean(
        &TruncationSpec::new(k_hi, RadialCutoff::ball_theta(part), t, delta),
        f,
        d,
        x_mag,
        tol,
    )?;
    // chi_lower part: ball cutoff at scale 2^{base_index}
    let base_spec = TruncationSpec::new(
        part.base_index as u32,
        RadialCutoff::ball_theta(part),
        t,
        delta,
    );
    let mut rhs = truncated_mean(&base_spec, f, d, x_mag, tol)?;
    for n in part.base_index as u32..k_hi {
        let spec = TruncationSpec::new(n, RadialCutoff::annular_chi(part), t, delta);
        rhs = rhs.combine(truncated_mean(&spec, f, d, x_mag, tol)?);
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::br_mean;

    #[test]
    fn cutoff_shapes() {
        let part = DyadicPartition::default();
        let ball = RadialCutoff::ball_theta(&part);
        assert_eq!(ball.eval(0.2), 1.0);
        assert_eq!(ball.eval(1.5), 0.0);
        let ann = RadialCutoff::annular_chi(&part);
        assert_eq!(ann.eval(1.0), 1.0);
        assert_eq!(ann.eval(0.3), 0.0);
        assert_eq!(ann.eval(2.2), 0.0);
    }

    #[test]
    fn saturated_ball_equals_plain_mean() {
        // Gaussian support [0, 14]; k = 4 puts the plateau at 2^4/2 = 8,
        // cutting only the negligible tail
        let f = RadialProfile::gaussian(2);
        let spec = TruncationSpec::new(
            4,
            RadialCutoff::ball_theta(&DyadicPartition::default()),
            2.0,
            0.4,
        );
        // the product profile has no attached transform, so this exercises
        // the genuine numeric path
        let mut f_nofreq = f.clone();
        f_nofreq.freq_side = None;
        let a = truncated_mean(&spec, &f_nofreq, 2, 0.7, 1e-8).unwrap();
        let b = br_mean(&f, 2, 0.4, 2.0, 0.7, 1e-9).unwrap();
        assert!(
            (a.value - b.value).norm() < 1e-6 * b.value.norm(),
            "{} vs {}",
            a.value,
            b.value
        );
    }

    #[test]
    fn annular_cutoff_missing_mass_gives_zero() {
        // annulus at 2^6 = 64: the Gaussian has no mass there
        let f = RadialProfile::gaussian(2);
        let spec = TruncationSpec::new(
            6,
            RadialCutoff::annular_chi(&DyadicPartition::default()),
            1.0,
            0.4,
        );
        let mut f_nofreq = f.clone();
        f_nofreq.freq_side = None;
        let a = truncated_mean(&spec, &f_nofreq, 2, 0.7, 1e-8).unwrap();
        assert!(a.value.norm() < 1e-8, "{}", a.value);
    }

    #[test]
    fn telescoping_decomposition() {
        let part = DyadicPartition {
            sharpness: 1.0,
            base_index: 2,
        };
        let f = RadialProfile::gaussian(2);
        let mut f_nofreq = f.clone();
        f_nofreq.freq_side = None;
        let (lhs, rhs) =
            annular_decomposition_check(&f_nofreq, 2, 0.3, 1.5, 0.9, &part, 5, 1e-8).unwrap();
        let tol = (lhs.err_estimate + rhs.err_estimate).max(1e-7 * lhs.value.norm());
        assert!(
            (lhs.value - rhs.value).norm() < 3.0 * tol,
            "lhs {} rhs {} tol {tol:.2e}",
            lhs.value,
            rhs.value
        );
    }
}
