//! The counterexample family: spectral profiles F_eps concentrated on the
//! thin annulus |N - |xi|^2| <~ N eps, their spatial sides f_eps, norms, and
//! scaling fits.
//!
//! Two independent evaluation routes for f_eps:
//!   - hankel: f_eps = (2 pi)^{-d} F_d(F_eps) by the radial transform;
//!   - oscillatory: the stationary-phase representation
//!       f_eps(x) = 2 Re[ c_d (eps N)^{d/2}
//!                        int psi_hat(t) t^{-d/2} e^{i phi(t,x)} dt ],
//!     phi(t, x) = t/eps + N eps |x|^2 / (4 t),
//!     c_d = (2 pi)^{-1} (4 pi)^{-d/2} e^{-i pi d / 4},
//! derived under the global Fourier convention (the branch constant is locked
//! by the dual-route agreement tests). The phase is stationary at
//! t* = eps sqrt(N) |x| / 2, inside supp psi_hat exactly when |x| is within
//! (x_c/2, 4 x_c) of the critical radius x_c = eps^{-1} N^{-1/2}.

use crate::error::{Error, Result};
use crate::fit::{log_log_fit, ExponentFit};
use crate::interp::CubicTable;
use crate::params::{regime, Exponent, Params, Regime};
use crate::profiles::SchwartzProfile;
use crate::quad::{integrate_oscillatory_opts, OscOptions, QuadResult};
use crate::radial::{radial_fourier, RadialProfile};
use crate::special::sphere_area;
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Grid policy for the spatial side: points per oscillation period around the
/// critical radius and the log-decade density on the envelope flanks.
const OSC_POINTS_PER_PERIOD: f64 = 16.0;
const LOG_POINTS_PER_DECADE: usize = 60;

/// One member of the family: parameters plus both sides of the transform.
pub struct FamilyMember {
    pub params: Params,
    psi: Arc<SchwartzProfile>,
    freq: RadialProfile,
    spatial: OnceLock<RadialProfile>,
    norm_samples: OnceLock<Arc<Vec<(f64, f64)>>>,
    norm_cache: Mutex<HashMap<u64, f64>>,
}

fn p_key(p: Exponent) -> u64 {
    match p {
        Exponent::Finite(v) => v.to_bits(),
        Exponent::Infinity => u64::MAX,
    }
}

impl FamilyMember {
    pub fn new(params: Params, psi: Arc<SchwartzProfile>) -> Result<Self> {
        let n = params.n();
        let eps = params.epsilon;
        let d = params.d;
        let s_max = psi.s_max;
        let r_hi = (n * (1.0 + eps * s_max)).sqrt();
        let r_lo = (n * (1.0 - eps * s_max)).max(0.0).sqrt();

        // Tail of int |F| r^{d-1} outside the window: psi's certified
        // envelope decays like (s_max/s)^6 beyond s_max.
        let tail = freq_tail_bound(&psi, n, eps, d, r_lo, r_hi);

        let freq = {
            let psi = psi.clone();
            RadialProfile::analytic_real(
                d,
                (r_lo, r_hi),
                tail,
                Arc::new(move |r| psi.eval((n - r * r) / (eps * n))),
            )
        };

        Ok(FamilyMember {
            params,
            psi,
            freq,
            spatial: OnceLock::new(),
            norm_samples: OnceLock::new(),
            norm_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn from_schedule(
        d: u32,
        p: Exponent,
        delta: f64,
        gamma: f64,
        j: u32,
        psi: Arc<SchwartzProfile>,
    ) -> Result<Self> {
        FamilyMember::new(Params::from_schedule(d, p, delta, gamma, j)?, psi)
    }

    /// The frequency profile F_eps(r) = psi((N - r^2)/(eps N)).
    pub fn freq_profile(&self) -> &RadialProfile {
        &self.freq
    }

    /// F_eps evaluated at radius r >= 0.
    pub fn f_eps_freq(&self, r: f64) -> f64 {
        let n = self.params.n();
        self.psi
            .eval((n - r * r) / (self.params.epsilon * n))
    }

    /// Hankel route: f_eps(x) = (2 pi)^{-d} F_d(F_eps)(|x|).
    pub fn f_eps_spatial_hankel(&self, x_mag: f64, tol: f64) -> Result<QuadResult> {
        let d = self.params.d;
        let c = (2.0 * PI).powf(-(d as f64));
        Ok(radial_fourier(&self.freq, d, x_mag, tol)?.scale(Complex64::new(c, 0.0)))
    }

    /// Stationary point of the phase for a given |x|.
    pub fn stationary_t(&self, x_mag: f64) -> f64 {
        0.5 * self.params.epsilon * self.params.n().sqrt() * x_mag
    }

    /// Oscillatory route (the cheap evaluator used for sweeps).
    pub fn f_eps_oscillatory(&self, x_mag: f64, tol: f64) -> Result<QuadResult> {
        let p = &self.params;
        let (d, eps, n) = (p.d as f64, p.epsilon, p.n());
        let (a, b) = self.psi.hat.support;
        let coeff = n * eps * x_mag * x_mag / 4.0;
        let t_star = self.stationary_t(x_mag);
        let hint = if t_star > a && t_star < b {
            vec![t_star]
        } else {
            vec![]
        };
        let hat = self.psi.hat.clone();
        let opts = OscOptions {
            rel_tol: tol,
            stationary_hint: Some(hint),
            ..Default::default()
        };
        let r = integrate_oscillatory_opts(
            move |t| Complex64::new(hat.eval(t) * t.powf(-d / 2.0), 0.0),
            |t| t / eps + coeff / t,
            |t| 1.0 / eps - coeff / (t * t),
            a,
            b,
            &opts,
        )?;
        // c_d = (2 pi)^{-1} (4 pi)^{-d/2} e^{-i pi d/4}; f = 2 Re[c_d (eps N)^{d/2} I]
        let scale = (eps * n).powf(d / 2.0) * (4.0 * PI).powf(-d / 2.0) / (2.0 * PI);
        let rotated = r.value * Complex64::from_polar(scale, -PI * d / 4.0);
        Ok(QuadResult {
            value: Complex64::new(2.0 * rotated.re, 0.0),
            err_estimate: 2.0 * scale * r.err_estimate,
            evals: r.evals,
        })
    }

    /// Wrap a sampled table in the spatial-profile metadata (interpolation
    /// probe, tail certificate, attached transform, mass radius).
    fn finish_spatial(&self, mut table: CubicTable, tail: f64) -> RadialProfile {
        let xc = self.params.x_crit();
        let mut interp_err = 0.0f64;
        {
            let (gx, _) = table.nodes();
            let probes = 32usize;
            let n_nodes = gx.len();
            let mut worst = 0.0f64;
            for i in 0..probes {
                let idx = 1 + (n_nodes - 2) * i / probes;
                let xm = 0.5 * (gx[idx] + gx[idx + 1]);
                if xm > xc / 8.0 && xm < 8.0 * xc {
                    if let Ok(direct) = self.f_eps_oscillatory(xm, 1e-8) {
                        worst = worst.max((table.eval(xm) - direct.value).norm());
                    }
                }
            }
            interp_err = interp_err.max(worst);
        }
        table.interp_err = interp_err;
        let mut prof = RadialProfile::sampled(self.params.d, table, tail, true);
        prof.freq_side = Some(Arc::new(self.freq.clone()));
        prof.mass_radius = Some(16.0 * xc);
        prof
    }

    /// Install a previously computed spatial table (cache priming). Returns
    /// false if the profile was already built.
    pub fn prime_spatial(&self, table: CubicTable, tail_bound: f64) -> bool {
        let mut fresh = false;
        self.spatial.get_or_init(|| {
            fresh = true;
            self.finish_spatial(table, tail_bound)
        });
        fresh
    }

    /// Sampled spatial profile (oscillation-resolving near x_c, logarithmic
    /// flanks), with the frequency side attached for multiplier shortcuts.
    pub fn spatial_profile(&self) -> &RadialProfile {
        self.spatial.get_or_init(|| {
            use rayon::prelude::*;
            let xc = self.params.x_crit();
            let sqrt_n = self.params.n().sqrt();
            let mut grid: Vec<f64> = vec![0.0];
            grid.extend(crate::interp::log_grid(1e-3 * xc, xc / 8.0, LOG_POINTS_PER_DECADE));
            // full oscillation resolution where the stationary point lives
            // ([x_c/2, 4 x_c] plus margin); lighter on the shoulders
            let step = 2.0 * PI / (sqrt_n * OSC_POINTS_PER_PERIOD);
            let coarse = 2.0 * PI / (sqrt_n * 5.0);
            let seams = [xc / 8.0, xc / 3.0, 5.0 * xc, 8.0 * xc];
            for (lo, hi, h) in [
                (seams[0], seams[1], coarse),
                (seams[1], seams[2], step),
                (seams[2], seams[3], coarse),
            ] {
                let n = ((hi - lo) / h).ceil() as usize;
                grid.extend(crate::interp::linear_grid(lo, hi, n.max(32)));
            }
            grid.extend(crate::interp::log_grid(8.0 * xc, 1e3 * xc, LOG_POINTS_PER_DECADE));
            grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
            grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * xc);

            let ys: Vec<Complex64> = grid
                .par_iter()
                .map(|&x| {
                    self.f_eps_oscillatory(x, 2e-6)
                        .map(|r| r.value)
                        .unwrap_or_else(|e| e.best_estimate().map(|(v, _)| v).unwrap_or_default())
                })
                .collect();
            let table = CubicTable::new(grid, ys);

            // Far-tail certificate: fit the (N eps |x|^2)^{-M} envelope at the
            // outermost samples (M = 3) and integrate it beyond the window.
            let d = self.params.d as f64;
            let n_eps = self.params.n() * self.params.epsilon;
            let r_edge = 1e3 * xc;
            let edge_val = self
                .f_eps_oscillatory(r_edge, 1e-6)
                .map(|r| r.value.norm())
                .unwrap_or(0.0)
                .max(1e-300);
            let c_fit = edge_val / (n_eps * r_edge * r_edge).powf(-3.0);
            // int_{r_edge}^inf C (N eps r^2)^{-3} r^{d-1} dr, d < 6
            let tail = c_fit * n_eps.powf(-3.0) * r_edge.powf(d - 6.0) / (6.0 - d);

            self.finish_spatial(table, tail)
        })
    }

    /// Samples of (r, |f_eps(r)|) shared by all norm computations.
    fn norm_samples(&self) -> Arc<Vec<(f64, f64)>> {
        self.norm_samples
            .get_or_init(|| {
                let prof = self.spatial_profile();
                let (xs, ys) = match prof_nodes(prof) {
                    Some(v) => v,
                    None => (Vec::new(), Vec::new()),
                };
                Arc::new(xs.into_iter().zip(ys.into_iter().map(|c| c.norm())).collect())
            })
            .clone()
    }

    /// Peak of |f_eps| over the sampled grid with parabolic refinement.
    pub fn peak(&self) -> (f64, f64) {
        let samples = self.norm_samples();
        let mut best = (0usize, 0.0f64);
        for (i, &(_, v)) in samples.iter().enumerate() {
            if v > best.1 {
                best = (i, v);
            }
        }
        let i = best.0;
        if i == 0 || i + 1 >= samples.len() {
            return (samples[i].0, samples[i].1);
        }
        let (x0, y0) = samples[i - 1];
        let (x1, y1) = samples[i];
        let (x2, y2) = samples[i + 1];
        // parabola through three points (assume near-uniform spacing)
        let denom = (y0 - 2.0 * y1 + y2).abs().max(1e-300);
        let shift = 0.5 * (y0 - y2) / (y0 - 2.0 * y1 + y2).signum() / denom
            * (y0 - y2).abs().min(denom);
        let xm = x1 + shift.clamp(-1.0, 1.0) * 0.5 * (x2 - x0) / 2.0;
        let ym = y1 + 0.125 * (y0 - y2) * (y0 - y2) / denom;
        (xm.clamp(x0, x2), ym.max(y1))
    }

    /// ||f_eps||_p over the configured annulus (defaults cover
    /// [1e-2 x_c, 1e2 x_c]); p = infinity returns the sampled sup.
    pub fn lp_norm(&self, p: Exponent) -> Result<f64> {
        if let Some(&v) = self.norm_cache.lock().unwrap().get(&p_key(p)) {
            return Ok(v);
        }
        let v = match p {
            Exponent::Infinity => self.peak().1,
            Exponent::Finite(pf) => {
                if !(pf >= 1.0) {
                    return Err(Error::InvalidParam(format!("lp_norm: p = {pf}")));
                }
                self.lp_norm_finite(pf)?
            }
        };
        self.norm_cache.lock().unwrap().insert(p_key(p), v);
        Ok(v)
    }

    fn lp_norm_finite(&self, p: f64) -> Result<f64> {
        let samples = self.norm_samples();
        if samples.len() < 16 {
            return Err(Error::DegenerateFit("too few norm samples".into()));
        }
        let d = self.params.d as f64;
        // Composite trapezoid over the full sampled grid of |f|^p r^{d-1}.
        // The grid resolves the oscillation around x_c (where all the mass
        // lives) with OSC_POINTS_PER_PERIOD points per period; the flanks are
        // superpolynomially small.
        let mut acc = 0.0;
        for w in samples.windows(2) {
            let (r0, v0) = w[0];
            let (r1, v1) = w[1];
            let f0 = v0.powf(p) * r0.powf(d - 1.0);
            let f1 = v1.powf(p) * r1.powf(d - 1.0);
            acc += 0.5 * (f0 + f1) * (r1 - r0);
        }
        Ok((sphere_area(self.params.d) * acc).powf(1.0 / p))
    }

    /// Frequency-side L2 norm via Plancherel: ||f||_2^2 = (2pi)^{-d} ||F||_2^2.
    pub fn plancherel_l2(&self) -> Result<f64> {
        let d = self.params.d;
        let (lo, hi) = self.freq.window;
        let r = crate::quad::integrate_adaptive_real(
            |r| self.f_eps_freq(r).powi(2) * r.powf(d as f64 - 1.0),
            lo.max(0.0),
            hi,
            1e-11,
        )?;
        Ok(((2.0 * PI).powf(-(d as f64)) * sphere_area(d) * r.value.re).sqrt())
    }

    /// Per-point decay against the three regime bounds with fitted constants.
    pub fn decay_report(&self, m_order: i32, xs: &[f64], ratio_threshold: f64) -> DecayReport {
        let p = &self.params;
        let (n, eps, d) = (p.n(), p.epsilon, p.d as f64);
        let neps = n * eps;
        let mut rows = Vec::new();
        for &x in xs {
            let value = self
                .f_eps_oscillatory(x, 1e-8)
                .map(|r| r.value.norm())
                .unwrap_or(f64::NAN);
            let reg = regime(x, eps, p.gamma, ratio_threshold).unwrap();
            let bound = match reg {
                Regime::Near => eps.powi(m_order) * neps.powf(d / 2.0),
                Regime::Critical => eps.sqrt() * neps.powf(d / 2.0),
                Regime::Far => (neps * x * x).powi(-m_order) * neps.powf(d / 2.0),
            };
            rows.push(DecayRow {
                x,
                regime: reg,
                value,
                bound,
                ratio: value / bound,
            });
        }
        let fit_c = |reg: Regime| -> f64 {
            rows.iter()
                .filter(|r| r.regime == reg && r.ratio.is_finite())
                .map(|r| r.ratio)
                .fold(0.0, f64::max)
        };
        DecayReport {
            m_order,
            c_near: fit_c(Regime::Near),
            c_critical: fit_c(Regime::Critical),
            c_far: fit_c(Regime::Far),
            rows,
        }
    }
}

fn prof_nodes(prof: &RadialProfile) -> Option<(Vec<f64>, Vec<Complex64>)> {
    prof.sample_nodes()
}

#[derive(Debug, Clone)]
pub struct DecayRow {
    pub x: f64,
    pub regime: Regime,
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct DecayReport {
    pub m_order: i32,
    pub c_near: f64,
    pub c_critical: f64,
    pub c_far: f64,
    pub rows: Vec<DecayRow>,
}

/// Predicted log-log slope of ||f_eps||_p against eps:
/// 1/2 + (1-gamma) d/2 + (gamma/2 - 1) d/p.
pub fn predicted_lp_slope(d: u32, p: Exponent, gamma: f64) -> f64 {
    let d = d as f64;
    0.5 + (1.0 - gamma) * d / 2.0 + (gamma / 2.0 - 1.0) * d * p.recip()
}

/// Predicted slope of sup |f_eps| against eps: 1/2 + (1-gamma) d/2.
pub fn predicted_peak_slope(d: u32, gamma: f64) -> f64 {
    predicted_lp_slope(d, Exponent::Infinity, gamma)
}

/// Fit the L^p scaling exponent over a geometric eps grid.
pub fn lp_scaling_fit(
    eps_grid: &[f64],
    d: u32,
    p: Exponent,
    gamma: f64,
    psi: &Arc<SchwartzProfile>,
) -> Result<ExponentFit> {
    if eps_grid.len() < 5 {
        return Err(Error::DegenerateFit(
            "need >= 5 eps points for a scaling fit".into(),
        ));
    }
    let mut norms = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let params = Params::new(d, p, 0.0, gamma, eps)?;
        let member = FamilyMember::new(params, psi.clone())?;
        norms.push(member.lp_norm(p)?);
    }
    log_log_fit(eps_grid, &norms)
}

/// Partial sum of the normalized series: sum_{j<=J} 2^{-j} f_j / ||f_j||_p.
pub struct SeriesPartial {
    pub members: Vec<Arc<FamilyMember>>,
    pub weights: Vec<f64>,
    /// Bound on the dropped tail sup_x |sum_{j>J}|.
    pub tail_bound: f64,
}

impl SeriesPartial {
    pub fn build(
        d: u32,
        p: Exponent,
        delta: f64,
        gamma: f64,
        j_max: u32,
        psi: &Arc<SchwartzProfile>,
    ) -> Result<Self> {
        let mut members = Vec::new();
        let mut weights = Vec::new();
        let mut last_ratio = 0.0f64;
        for j in 0..=j_max {
            let m = Arc::new(FamilyMember::from_schedule(d, p, delta, gamma, j, psi.clone())?);
            let norm = m.lp_norm(p)?;
            if !(norm > 0.0) {
                return Err(Error::DegenerateFit(format!("vanishing norm at j = {j}")));
            }
            let w = 0.5f64.powi(j as i32) / norm;
            last_ratio = m.peak().1 / norm;
            members.push(m);
            weights.push(w);
        }
        // sup|f_j|/||f_j||_p decreases along the schedule; bound the dropped
        // tail by a geometric sum at the last computed ratio.
        let tail_bound = 0.5f64.powi(j_max as i32) * last_ratio;
        Ok(SeriesPartial {
            members,
            weights,
            tail_bound,
        })
    }

    /// Evaluate the partial sum at |x| = x_mag.
    pub fn eval(&self, x_mag: f64, tol: f64) -> Result<QuadResult> {
        let mut acc = QuadResult::zero();
        for (m, &w) in self.members.iter().zip(&self.weights) {
            let r = m.f_eps_oscillatory(x_mag, tol)?;
            acc = acc.combine(r.scale(Complex64::new(w, 0.0)));
        }
        Ok(acc)
    }
}

fn freq_tail_bound(
    psi: &SchwartzProfile,
    n: f64,
    eps: f64,
    d: u32,
    r_lo: f64,
    r_hi: f64,
) -> f64 {
    let d = d as f64;
    // |F(r)| <= tail_bound (s_max / |s(r)|)^6 outside the window.
    let env = |r: f64| -> f64 {
        let s = ((n - r * r) / (eps * n)).abs().max(psi.s_max);
        psi.tail_bound * (psi.s_max / s).powi(6)
    };
    // inner part: [0, r_lo]
    let mut tail = if r_lo > 0.0 {
        psi.tail_bound * r_lo.powf(d) / d
    } else {
        0.0
    };
    // outer part: numeric envelope integral on [r_hi, 20 r_hi] plus the
    // power-law remainder (s grows like r^2, envelope like r^{-12})
    let n_steps = 2000;
    let hi = 20.0 * r_hi;
    let h = (hi - r_hi) / n_steps as f64;
    for i in 0..n_steps {
        let r = r_hi + (i as f64 + 0.5) * h;
        tail += env(r) * r.powf(d - 1.0) * h;
    }
    tail += env(hi) * hi.powf(d) / (12.0 - d);
    tail
}
