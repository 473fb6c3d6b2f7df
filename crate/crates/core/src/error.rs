use num_complex::Complex64;

/// Errors shared by all numerical modules.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// Quadrature ran out of subdivisions before meeting the tolerance.
    /// Carries the best estimate so callers can degrade gracefully.
    #[error("quadrature did not converge in {context}: best {value}, err estimate {err:.3e} (target {target:.3e})")]
    QuadFailure {
        context: String,
        value: Complex64,
        err: f64,
        target: f64,
    },

    /// Oscillatory integrator could not isolate the stationary-point structure.
    #[error("unresolved stationary points in {context}: {detail}")]
    StationaryPoints { context: String, detail: String },

    #[error("schedule index j = {j} beyond precision ceiling {ceiling}: phase arguments t/eps exceed double-precision oscillation resolution")]
    PrecisionCeiling { j: u32, ceiling: u32 },

    #[error("profile tail not certified: {0}")]
    TailNotCertified(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// `gamma_max` is undefined when the critical index vanishes.
    #[error("critical index delta(d,p) = 0: gamma_max undefined")]
    GammaMaxUndefined,

    /// Divergence experiment requested with sigma >= 0.
    #[error("sigma = {sigma:.6} >= 0: no divergence predicted (need gamma < gamma_max = {gamma_max:.6})")]
    SigmaNonNegative { sigma: f64, gamma_max: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Best-effort value recovery from a quadrature failure.
    pub fn best_estimate(&self) -> Option<(Complex64, f64)> {
        match self {
            Error::QuadFailure { value, err, .. } => Some((*value, *err)),
            _ => None,
        }
    }
}
