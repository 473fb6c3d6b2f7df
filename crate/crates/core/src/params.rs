//! Parameter algebra: the critical index, the doubly exponential schedule,
//! regime classification, and the divergence criterion sigma.

use crate::error::{Error, Result};

/// Integrability exponent p in [1, infinity].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    pub fn validate(self) -> Result<Self> {
        match self {
            Exponent::Finite(p) if !(p >= 1.0) => Err(Error::InvalidParam(format!(
                "exponent p = {p} must be >= 1"
            ))),
            other => Ok(other),
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "oo" => Ok(Exponent::Infinity),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::InvalidParam(format!("cannot parse exponent '{other}'")))
                .and_then(|p| Exponent::Finite(p).validate()),
        }
    }
}

/// Critical index delta(d, p) = max(0, -1/2 + d |1/2 - 1/p|).
pub fn critical_index(d: u32, p: Exponent) -> Result<f64> {
    if d < 1 {
        return Err(Error::InvalidParam("dimension d must be >= 1".into()));
    }
    let p = p.validate()?;
    Ok((d as f64 * (0.5 - p.recip()).abs() - 0.5).max(0.0))
}

/// Default ceiling for the doubly exponential schedule: eps_4 = 2^{-16}.
/// Beyond this the phase t/eps outruns double-precision resolution.
pub const DEFAULT_J_CEILING: u32 = 4;

/// (eps_j, N_j) = (2^{-2^j}, 2^{gamma 2^j}) with the default ceiling.
pub fn schedule(j: u32, gamma: f64) -> Result<(f64, f64)> {
    schedule_with_ceiling(j, gamma, DEFAULT_J_CEILING)
}

pub fn schedule_with_ceiling(j: u32, gamma: f64, ceiling: u32) -> Result<(f64, f64)> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParam(format!(
            "schedule: gamma = {gamma} must lie in (0, 1)"
        )));
    }
    if j > ceiling {
        return Err(Error::PrecisionCeiling { j, ceiling });
    }
    let pow = (1u64 << j) as f64;
    Ok(((-pow).exp2(), (gamma * pow).exp2()))
}

/// sigma = delta - delta(d,p) + gamma delta(d,p)/2 and, when defined, the
/// largest admissible gamma.
#[derive(Debug, Clone, Copy)]
pub struct SigmaReport {
    pub sigma: f64,
    pub critical: f64,
    pub gamma_max: Option<f64>,
}

pub fn sigma(d: u32, p: Exponent, delta: f64, gamma: f64) -> Result<SigmaReport> {
    let critical = critical_index(d, p)?;
    let sigma = delta - critical + gamma * critical / 2.0;
    let gamma_max = if critical > 0.0 {
        Some(2.0 * (critical - delta) / critical)
    } else {
        None
    };
    Ok(SigmaReport {
        sigma,
        critical,
        gamma_max,
    })
}

pub fn gamma_max(d: u32, p: Exponent, delta: f64) -> Result<f64> {
    sigma(d, p, delta, 0.5)?.gamma_max.ok_or(Error::GammaMaxUndefined)
}

/// Spatial / truncation regimes relative to the critical radius
/// x_c = eps^{-1} N^{-1/2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Near,
    Critical,
    Far,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Near => write!(f, "near"),
            Regime::Critical => write!(f, "critical"),
            Regime::Far => write!(f, "far"),
        }
    }
}

/// Classify a scale (|x| or 2^k) against x_c with a multiplicative threshold.
/// The proof-scale thresholds 10^{+-10} are unusable at desk scale; 4 is the
/// default, configurable.
pub fn regime(scale: f64, epsilon: f64, gamma: f64, ratio_threshold: f64) -> Result<Regime> {
    if !(scale > 0.0) {
        return Err(Error::InvalidParam("regime: scale must be positive".into()));
    }
    if !(ratio_threshold > 1.0) {
        return Err(Error::InvalidParam(
            "regime: ratio_threshold must exceed 1".into(),
        ));
    }
    let xc = critical_radius(epsilon, gamma);
    Ok(if scale < xc / ratio_threshold {
        Regime::Near
    } else if scale > xc * ratio_threshold {
        Regime::Far
    } else {
        Regime::Critical
    })
}

/// x_c = eps^{-1} N^{-1/2} = eps^{gamma/2 - 1}
pub fn critical_radius(epsilon: f64, gamma: f64) -> f64 {
    epsilon.powf(gamma / 2.0 - 1.0)
}

/// Full parameter block for one family member / experiment.
#[derive(Debug, Clone, Copy)]
pub struct Params {
    pub d: u32,
    pub p: Exponent,
    pub delta: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

impl Params {
    pub fn new(d: u32, p: Exponent, delta: f64, gamma: f64, epsilon: f64) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidParam("dimension d must be >= 1".into()));
        }
        p.validate()?;
        if !(delta >= 0.0) {
            return Err(Error::InvalidParam(format!("delta = {delta} must be >= 0")));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidParam(format!(
                "gamma = {gamma} must lie in (0, 1)"
            )));
        }
        if !(epsilon > 0.0 && epsilon <= 0.5) {
            return Err(Error::InvalidParam(format!(
                "epsilon = {epsilon} must lie in (0, 1/2]"
            )));
        }
        Ok(Params {
            d,
            p,
            delta,
            gamma,
            epsilon,
        })
    }

    pub fn from_schedule(d: u32, p: Exponent, delta: f64, gamma: f64, j: u32) -> Result<Self> {
        let (eps, _) = schedule(j, gamma)?;
        Params::new(d, p, delta, gamma, eps)
    }

    /// N = eps^{-gamma}, recomputed on demand, never stored.
    pub fn n(&self) -> f64 {
        self.epsilon.powf(-self.gamma)
    }

    /// Critical radius x_c = eps^{-1} N^{-1/2} > 1.
    pub fn x_crit(&self) -> f64 {
        critical_radius(self.epsilon, self.gamma)
    }

    pub fn critical_index(&self) -> f64 {
        critical_index(self.d, self.p).expect("validated at construction")
    }

    /// Validate the divergence-experiment preconditions:
    /// p >= 2d/(d-1) and delta < delta(d,p), i.e. sigma can be negative.
    pub fn validate_divergence(&self) -> Result<SigmaReport> {
        if self.d >= 2 {
            let p_min = 2.0 * self.d as f64 / (self.d as f64 - 1.0);
            let ok = match self.p {
                Exponent::Infinity => true,
                Exponent::Finite(p) => p >= p_min,
            };
            if !ok {
                return Err(Error::InvalidParam(format!(
                    "divergence experiment requires p >= 2d/(d-1) = {p_min}, got p = {}",
                    self.p
                )));
            }
        }
        let rep = sigma(self.d, self.p, self.delta, self.gamma)?;
        if rep.critical <= self.delta {
            return Err(Error::InvalidParam(format!(
                "divergence experiment requires delta < delta(d,p) = {}, got delta = {}",
                rep.critical, self.delta
            )));
        }
        Ok(rep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_index_hand_values() {
        let inf = Exponent::Infinity;
        assert_eq!(critical_index(2, inf).unwrap(), 0.5);
        assert_eq!(critical_index(3, Exponent::Finite(2.0)).unwrap(), 0.0);
        assert_eq!(critical_index(3, Exponent::Finite(4.0)).unwrap(), 0.25);
        assert!(critical_index(2, Exponent::Finite(0.5)).is_err());
    }

    #[test]
    fn schedule_values() {
        assert_eq!(schedule(0, 0.2).unwrap().0, 0.5);
        assert_eq!(schedule(2, 0.2).unwrap().0, 1.0 / 16.0);
        let (_, n1) = schedule(1, 0.2).unwrap();
        assert!((n1 - 2f64.powf(0.4)).abs() < 1e-15);
        assert!((n1 - 1.31951).abs() < 1e-5);
        assert!(matches!(
            schedule(9, 0.2),
            Err(Error::PrecisionCeiling { .. })
        ));
    }

    #[test]
    fn schedule_squares() {
        for j in 0..=3 {
            let (e, _) = schedule(j, 0.3).unwrap();
            let (e_next, _) = schedule(j + 1, 0.3).unwrap();
            assert_eq!(e_next, e * e);
        }
    }

    #[test]
    fn sigma_values() {
        let r = sigma(2, Exponent::Infinity, 0.3, 0.2).unwrap();
        assert!((r.sigma + 0.15).abs() < 1e-15);
        let r = sigma(2, Exponent::Infinity, 0.5, 0.2).unwrap();
        assert!((r.sigma - 0.05).abs() < 1e-15);
        let r = sigma(3, Exponent::Finite(4.0), 0.0, 0.1).unwrap();
        assert!((r.sigma + 0.2375).abs() < 1e-15);
        // sigma at gamma_max vanishes to machine precision
        let gm = gamma_max(2, Exponent::Infinity, 0.3).unwrap();
        let r = sigma(2, Exponent::Infinity, 0.3, gm).unwrap();
        assert!(r.sigma.abs() < 1e-15);
        // undefined when the critical index vanishes
        assert!(matches!(
            gamma_max(3, Exponent::Finite(2.0), 0.0),
            Err(Error::GammaMaxUndefined)
        ));
    }

    #[test]
    fn regime_classification() {
        let (eps, gamma) = (1.0 / 16.0, 0.2);
        let xc = critical_radius(eps, gamma);
        assert_eq!(regime(xc, eps, gamma, 4.0).unwrap(), Regime::Critical);
        assert_eq!(regime(1e-12 * xc, eps, gamma, 4.0).unwrap(), Regime::Near);
        assert_eq!(regime(1e12 * xc, eps, gamma, 4.0).unwrap(), Regime::Far);
        assert!(regime(1.0, eps, gamma, 0.5).is_err());
    }

    #[test]
    fn params_invariants() {
        let p = Params::new(2, Exponent::Infinity, 0.3, 0.2, 1.0 / 16.0).unwrap();
        assert!((p.n() - 16f64.powf(0.2)).abs() < 1e-15);
        assert!((p.x_crit() - p.epsilon.powf(p.gamma / 2.0 - 1.0)).abs() < 1e-15);
        assert!(p.x_crit() > 1.0);
        assert!(p.validate_divergence().is_ok());
        // delta >= delta(d,p) rejected
        let p = Params::new(2, Exponent::Infinity, 0.6, 0.2, 1.0 / 16.0).unwrap();
        assert!(p.validate_divergence().is_err());
        // p below 2d/(d-1) rejected
        let p = Params::new(3, Exponent::Finite(2.5), 0.0, 0.2, 1.0 / 16.0).unwrap();
        assert!(p.validate_divergence().is_err());
    }
}
