//! Least-squares slope extraction for log-log scaling experiments.

use crate::error::{Error, Result};

/// Result of a log-log regression.
#[derive(Debug, Clone, Copy)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS of the residuals in log space.
    pub residual: f64,
    /// 95% confidence half-width of the slope.
    pub half_width: f64,
    pub n: usize,
}

/// Two-sided 97.5% Student-t quantiles for small degrees of freedom.
const T975: [f64; 12] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179,
];

fn t975(df: usize) -> f64 {
    if df == 0 {
        f64::INFINITY
    } else if df <= T975.len() {
        T975[df - 1]
    } else {
        1.96 + 2.4 / df as f64
    }
}

/// Ordinary least squares y = slope * x + intercept.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<ExponentFit> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need >= 3 paired points, got {} / {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 || !sxx.is_finite() {
        return Err(Error::DegenerateFit("zero variance in x".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    if !rss.is_finite() {
        return Err(Error::DegenerateFit("non-finite residuals".into()));
    }
    let df = xs.len() - 2;
    let se = if df > 0 { (rss / df as f64 / sxx).sqrt() } else { f64::INFINITY };
    Ok(ExponentFit {
        slope,
        intercept,
        residual: (rss / n).sqrt(),
        half_width: t975(df) * se,
        n: xs.len(),
    })
}

/// Fit log y = slope * log x + c. All data must be strictly positive.
pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> Result<ExponentFit> {
    if xs.iter().any(|&x| !(x > 0.0)) || ys.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::DegenerateFit(
            "log-log fit requires strictly positive data".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly)
}
