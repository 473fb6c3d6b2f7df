//! Globally adaptive Gauss-Kronrod (G7, K15) quadrature for complex integrands.

use super::{QuadOptions, QuadResult};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

// K15 abscissae (positive half) and weights; G7 weights sit on xgk[1,3,5,7].
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

struct PanelEval {
    value: Complex64,
    err: f64,
    resabs: f64,
}

fn gk15(f: &mut dyn FnMut(f64) -> Complex64, a: f64, b: f64) -> PanelEval {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut resk = Complex64::new(0.0, 0.0);
    let mut resg = Complex64::new(0.0, 0.0);
    let mut resabs = 0.0;
    let mut samples = [Complex64::new(0.0, 0.0); 15];
    let mut idx = 0;
    for (j, &x) in XGK.iter().enumerate() {
        if x == 0.0 {
            let v = f(c);
            samples[idx] = v;
            idx += 1;
            resk += WGK[j] * v;
            resg += WG[3] * v;
            resabs += WGK[j] * v.norm();
        } else {
            let v1 = f(c - h * x);
            let v2 = f(c + h * x);
            samples[idx] = v1;
            samples[idx + 1] = v2;
            idx += 2;
            resk += WGK[j] * (v1 + v2);
            resabs += WGK[j] * (v1.norm() + v2.norm());
            if j % 2 == 1 {
                resg += WG[j / 2] * (v1 + v2);
            }
        }
    }
    let mean = resk * 0.5;
    let mut resasc = 0.0;
    idx = 0;
    for (j, &x) in XGK.iter().enumerate() {
        if x == 0.0 {
            resasc += WGK[j] * (samples[idx] - mean).norm();
            idx += 1;
        } else {
            resasc +=
                WGK[j] * ((samples[idx] - mean).norm() + (samples[idx + 1] - mean).norm());
            idx += 2;
        }
    }
    resasc *= h.abs();
    let raw = ((resk - resg) * h).norm();
    let mut err = raw;
    if resasc != 0.0 && raw != 0.0 {
        err = resasc * (1.0f64).min((200.0 * raw / resasc).powf(1.5));
    }
    let round = 50.0 * f64::EPSILON * resabs * h.abs();
    PanelEval {
        value: resk * h,
        err: err.max(round),
        resabs: resabs * h.abs(),
    }
}

#[derive(Debug)]
struct Interval {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    resabs: f64,
    /// Set once the interval is at floating-point resolution.
    frozen: bool,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = if self.frozen { -1.0 } else { self.err };
        let rhs = if other.frozen { -1.0 } else { other.err };
        lhs.partial_cmp(&rhs).unwrap_or(Ordering::Equal)
    }
}

/// Adaptive integral of a complex-valued function over [a, b].
///
/// The target is |value - true| <= max(rel_tol * |value|, abs_tol); the
/// reported `err_estimate` additionally carries a cancellation floor of
/// eps * integral(|f|), so heavily cancelling integrals report an honest
/// noise level.
pub fn integrate_adaptive_opts(
    mut f: impl FnMut(f64) -> Complex64,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !(a < b) {
        return Err(Error::InvalidParam(format!(
            "integrate_adaptive: need a < b, got [{a}, {b}]"
        )));
    }
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    let mut total = Complex64::new(0.0, 0.0);
    let mut toterr = 0.0;
    let mut totabs = 0.0;

    let mut pts: Vec<f64> = Vec::with_capacity(opts.split_points.len() + 2);
    pts.push(a);
    for &p in &opts.split_points {
        if p > a && p < b {
            pts.push(p);
        }
    }
    pts.push(b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();

    for w in pts.windows(2) {
        let pe = gk15(&mut f, w[0], w[1]);
        evals += 15;
        total += pe.value;
        toterr += pe.err;
        totabs += pe.resabs;
        heap.push(Interval {
            a: w[0],
            b: w[1],
            value: pe.value,
            err: pe.err,
            resabs: pe.resabs,
            frozen: false,
        });
    }

    // An error estimate at the rounding floor of integral(|f|) counts as
    // converged: no subdivision can improve on it in f64.
    let tolerance = |v: Complex64, l1: f64| -> f64 {
        opts.abs_tol
            .max(opts.rel_tol * v.norm())
            .max(100.0 * f64::EPSILON * l1)
            .max(opts.rel_noise * l1)
    };

    while toterr > tolerance(total, totabs) && heap.len() < opts.max_intervals {
        let worst = match heap.pop() {
            Some(i) => i,
            None => break,
        };
        if worst.frozen {
            heap.push(worst);
            break; // every remaining interval is at floating-point resolution
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(Interval {
                frozen: true,
                ..worst
            });
            continue;
        }
        total -= worst.value;
        toterr -= worst.err;
        totabs -= worst.resabs;
        let le = gk15(&mut f, worst.a, mid);
        let re = gk15(&mut f, mid, worst.b);
        evals += 30;
        total += le.value + re.value;
        toterr += le.err + re.err;
        totabs += le.resabs + re.resabs;
        heap.push(Interval {
            a: worst.a,
            b: mid,
            value: le.value,
            err: le.err,
            resabs: le.resabs,
            frozen: false,
        });
        heap.push(Interval {
            a: mid,
            b: worst.b,
            value: re.value,
            err: re.err,
            resabs: re.resabs,
            frozen: false,
        });
    }

    let noise_floor = (f64::EPSILON + opts.rel_noise) * totabs;
    let err_estimate = toterr + noise_floor;
    let result = QuadResult {
        value: total,
        err_estimate,
        evals,
    };
    if toterr > tolerance(total, totabs) {
        return Err(Error::QuadFailure {
            context: "integrate_adaptive".into(),
            value: total,
            err: err_estimate,
            target: tolerance(total, totabs),
        });
    }
    Ok(result)
}

/// Adaptive integral with relative tolerance `tol` (see `QuadOptions` default
/// for the absolute floor).
pub fn integrate_adaptive(
    f: impl FnMut(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadResult> {
    integrate_adaptive_opts(f, a, b, &QuadOptions::with_tol(tol))
}

/// Convenience wrapper for real integrands.
pub fn integrate_adaptive_real(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadResult> {
    integrate_adaptive(move |x| Complex64::new(f(x), 0.0), a, b, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        // int_0^1 t^2 dt = 1/3
        let r = integrate_adaptive_real(|t| t * t, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value.re - 1.0 / 3.0).abs() < 1e-14);
        assert!(r.evals > 0);
    }

    #[test]
    fn truncated_exponential() {
        // int_0^60 e^{-t} dt = 1 - e^{-60} ~ 1
        let r = integrate_adaptive_real(|t| (-t).exp(), 0.0, 60.0, 1e-12).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-11);
    }

    #[test]
    fn oscillatory_moderate() {
        // int_0^10 sin(10 t) dt = (1 - cos(100)) / 10
        let r = integrate_adaptive_real(|t| (10.0 * t).sin(), 0.0, 10.0, 1e-10).unwrap();
        let exact = (1.0 - (100.0f64).cos()) / 10.0;
        assert!((r.value.re - exact).abs() < 1e-11);
    }

    #[test]
    fn complex_phase() {
        // int_0^1 e^{i w t} dt = (e^{iw} - 1)/(iw)
        let w = 37.0;
        let r = integrate_adaptive(
            |t| Complex64::from_polar(1.0, w * t),
            0.0,
            1.0,
            1e-12,
        )
        .unwrap();
        let exact = (Complex64::from_polar(1.0, w) - 1.0) / Complex64::new(0.0, w);
        assert!((r.value - exact).norm() < 1e-11);
    }

    #[test]
    fn endpoint_singularity() {
        // int_0^1 t^{-1/2} dt = 2 (integrable endpoint singularity)
        let r = integrate_adaptive_opts(
            |t| Complex64::new(if t > 0.0 { 1.0 / t.sqrt() } else { 0.0 }, 0.0),
            0.0,
            1.0,
            &QuadOptions {
                rel_tol: 1e-9,
                ..QuadOptions::default()
            },
        )
        .unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-7);
    }

    #[test]
    fn split_points_respected() {
        // kink at 0.3: |t - 0.3|^0.2
        let opts = QuadOptions {
            rel_tol: 1e-10,
            split_points: vec![0.3],
            ..QuadOptions::default()
        };
        let r = integrate_adaptive_opts(
            |t| Complex64::new((t - 0.3f64).abs().powf(0.2), 0.0),
            0.0,
            1.0,
            &opts,
        )
        .unwrap();
        // exact: int |u|^.2 over [-0.3, 0.7] = (0.3^1.2 + 0.7^1.2)/1.2
        let exact = (0.3f64.powf(1.2) + 0.7f64.powf(1.2)) / 1.2;
        assert!((r.value.re - exact).abs() < 1e-8);
    }

    #[test]
    fn nonconvergence_carries_best_estimate() {
        let opts = QuadOptions {
            rel_tol: 1e-14,
            max_intervals: 4,
            ..QuadOptions::default()
        };
        let e = integrate_adaptive_opts(
            |t| Complex64::new((1.0 / (1e-6 + t)).sin(), 0.0),
            0.0,
            1.0,
            &opts,
        )
        .unwrap_err();
        let (v, err) = e.best_estimate().expect("carries estimate");
        assert!(v.norm().is_finite() && err.is_finite());
    }

    #[test]
    fn invalid_interval() {
        assert!(integrate_adaptive_real(|t| t, 1.0, 0.0, 1e-6).is_err());
    }
}
