//! Reusable Filon decomposition for int a(t) e^{i omega t} dt evaluated at
//! many frequencies: the amplitude is interpolated once on an adaptively
//! refined panel tree, after which each frequency costs one moment
//! contraction per panel.

use super::oscillatory::{linear_phase_moments, poly_coeffs, NODES};
use num_complex::Complex64;
use std::f64::consts::PI;

struct Panel {
    mid: f64,
    hh: f64,
    coeffs: Vec<Complex64>,
}

pub struct LinearPhaseTransform {
    panels: Vec<Panel>,
    amp_l1: f64,
}

impl LinearPhaseTransform {
    /// Decompose the amplitude over [a, b]; `amp_tol` is the relative
    /// interpolation accuracy (against the amplitude's sup-norm).
    pub fn new(amp: impl Fn(f64) -> Complex64, a: f64, b: f64, amp_tol: f64) -> Self {
        assert!(a < b);
        let mut panels = Vec::new();
        let mut amp_l1 = 0.0;
        // sup-norm estimate for the refinement criterion
        let mut sup = 0.0f64;
        for i in 0..=64 {
            sup = sup.max(amp(a + (b - a) * i as f64 / 64.0).norm());
        }
        let sup = sup.max(1e-300);
        subdivide(&amp, a, b, amp_tol * sup, 0, &mut panels, &mut amp_l1);
        LinearPhaseTransform { panels, amp_l1 }
    }

    /// int_a^b a(t) e^{i omega t} dt
    pub fn eval(&self, omega: f64) -> Complex64 {
        let mut out = Complex64::new(0.0, 0.0);
        for p in &self.panels {
            let kappa = omega * p.hh;
            let moments = linear_phase_moments(kappa);
            let mut inner = Complex64::new(0.0, 0.0);
            for (k, c) in p.coeffs.iter().enumerate() {
                inner += c * moments[k];
            }
            out += Complex64::from_polar(p.hh, omega * p.mid) * inner;
        }
        out
    }

    /// Cancellation noise floor for values of `eval`.
    pub fn noise_floor(&self) -> f64 {
        f64::EPSILON * self.amp_l1
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }
}

fn subdivide(
    amp: &impl Fn(f64) -> Complex64,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    depth: usize,
    panels: &mut Vec<Panel>,
    amp_l1: &mut f64,
) {
    let mid = 0.5 * (lo + hi);
    let hh = 0.5 * (hi - lo);
    let mut us = [0.0f64; NODES];
    let mut gs = [Complex64::new(0.0, 0.0); NODES];
    for i in 0..NODES {
        let u = (PI * i as f64 / (NODES - 1) as f64).cos();
        us[i] = u;
        gs[i] = amp(mid + hh * u);
    }
    let coeffs = poly_coeffs(&us, &gs);
    // Interpolation error probed between nodes.
    let mut worst = 0.0f64;
    for i in 0..NODES - 1 {
        let u = 0.5 * (us[i] + us[i + 1]);
        let mut p = Complex64::new(0.0, 0.0);
        let mut upow = 1.0;
        for c in &coeffs {
            p += c * upow;
            upow *= u;
        }
        worst = worst.max((p - amp(mid + hh * u)).norm());
    }
    if worst > abs_tol && depth < 40 {
        subdivide(amp, lo, mid, abs_tol, depth + 1, panels, amp_l1);
        subdivide(amp, mid, hi, abs_tol, depth + 1, panels, amp_l1);
    } else {
        *amp_l1 += gs.iter().map(|g| g.norm()).sum::<f64>() * 2.0 * hh / NODES as f64;
        panels.push(Panel {
            mid,
            hh,
            coeffs,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_quadrature() {
        let amp = |t: f64| Complex64::new((-t * t).exp(), 0.5 * t);
        let tr = LinearPhaseTransform::new(amp, -3.0, 3.0, 1e-12);
        for &w in &[0.0, 1.0, 17.3, 230.0] {
            let direct = crate::quad::integrate_oscillatory(
                amp,
                |t| w * t,
                |_| w,
                -3.0,
                3.0,
                1e-11,
            )
            .unwrap();
            let fast = tr.eval(w);
            assert!(
                (fast - direct.value).norm() < 1e-9,
                "w={w}: {fast} vs {}",
                direct.value
            );
        }
    }

    #[test]
    fn ramped_amplitude_refines() {
        let hat = crate::profiles::BumpSpec::psi_hat();
        let tr = LinearPhaseTransform::new(
            |t| Complex64::new(hat.eval(t), 0.0),
            0.25,
            2.0,
            1e-12,
        );
        assert!(tr.panel_count() > 4);
        // zero frequency: plain integral of the bump
        let direct = crate::quad::integrate_adaptive(
            |t| Complex64::new(hat.eval(t), 0.0),
            0.25,
            2.0,
            1e-12,
        )
        .unwrap();
        assert!((tr.eval(0.0) - direct.value).norm() < 1e-10);
    }
}
