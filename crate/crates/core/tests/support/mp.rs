//! Multiple-precision power-series oracle for Bessel J of integer and
//! half-integer order. 448-bit arithmetic absorbs the series cancellation
//! (max term ~ e^r) for arguments up to r = 50 and beyond.

use astro_float::{BigFloat, Consts, RoundingMode};

const PREC: usize = 448;
const RM: RoundingMode = RoundingMode::ToEven;

fn to_f64(b: &BigFloat) -> f64 {
    format!("{b}").parse().unwrap_or(f64::NAN)
}

/// J_m(r) with m = two_m / 2 by the defining power series
///   sum_k (-1)^k (r/2)^{m+2k} / (k! Gamma(m+k+1)).
pub fn mp_bessel_j(two_m: u32, r: f64) -> f64 {
    assert!(r >= 0.0);
    if r == 0.0 {
        return if two_m == 0 { 1.0 } else { 0.0 };
    }
    let big = |v: f64| BigFloat::from_f64(v, PREC);
    let half_x = big(r / 2.0);
    let q = half_x.mul(&half_x, PREC, RM);

    // t0 = (r/2)^m / Gamma(m+1)
    let mut t0 = big(1.0);
    if two_m % 2 == 0 {
        let m_int = (two_m / 2) as u64;
        for k in 0..m_int {
            // multiply by (r/2) / (k+1)
            t0 = t0.mul(&half_x, PREC, RM).div(&big((k + 1) as f64), PREC, RM);
        }
    } else {
        // m = n + 1/2: Gamma(m+1) = sqrt(pi) (2n+1)!! / 2^{n+1}
        let n = (two_m / 2) as u64; // floor(m)
        let mut consts = Consts::new().expect("astro-float consts");
        let pi = consts.pi(PREC, RM);
        let mut gamma_m1 = pi.sqrt(PREC, RM);
        let mut dd = big(1.0);
        for i in 0..=n {
            dd = dd.mul(&big((2 * i + 1) as f64), PREC, RM);
        }
        gamma_m1 = gamma_m1
            .mul(&dd, PREC, RM)
            .div(&big(2f64.powi(n as i32 + 1)), PREC, RM);
        // (r/2)^{n + 1/2}
        let mut p = half_x.sqrt(PREC, RM);
        for _ in 0..n {
            p = p.mul(&half_x, PREC, RM);
        }
        t0 = p.div(&gamma_m1, PREC, RM);
    }

    let m_f = two_m as f64 / 2.0;
    let mut term = t0;
    let mut sum = term.clone();
    for k in 0..500u32 {
        let kf = k as f64;
        term = term
            .mul(&q, PREC, RM)
            .div(&big((kf + 1.0) * (m_f + kf + 1.0)), PREC, RM)
            .neg();
        sum = sum.add(&term, PREC, RM);
        // terms decay past k ~ r/2; stop well below the f64 target
        if kf > r && to_f64(&term).abs() < 1e-40 * to_f64(&sum).abs().max(1e-300) {
            break;
        }
    }
    to_f64(&sum)
}
