use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes shared by every module of the crate.
///
/// `Display` renders a single-line diagnostic that starts with a stable
/// kebab-case token, e.g. `horseshoe-inequality-1-failed, margin=-0.42`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid-params, {reason} (a={a}, b={b})")]
    InvalidParams { a: f64, b: f64, reason: &'static str },

    #[error("domain-error, {what}={value} outside {expected}")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("monotone-regime, a={a} <= 4 has no interior critical points")]
    MonotoneRegime { a: f64 },

    #[error("critical-point-singularity, x={x} within {radius} of critical point {critical}")]
    CriticalPointSingularity { x: f64, critical: f64, radius: f64 },

    #[error("{condition}, margin={margin}")]
    PreconditionFailed { condition: String, margin: f64 },

    #[error("convergence-failure, {context}")]
    ConvergenceFailure { context: String },

    #[error("certificate-required, {reason}")]
    CertificateRequired { reason: String },

    #[error("not-found, {context}")]
    NotFound { context: String },

    #[error("size-error, {what}={value} exceeds cap {max}")]
    TooLarge {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("escaped-set, iterate {step} at y={y} left J1 and J2")]
    EscapedSet { step: usize, y: f64 },

    #[error("domain-escape, {context}")]
    DomainEscape { context: String },

    #[error("not-periodic, residual={residual}")]
    NotPeriodic { residual: f64 },

    #[error("not-close, C1 distance {distance} exceeds {tolerance}")]
    NotClose { distance: f64, tolerance: f64 },

    #[error("invalid-word, {reason}")]
    InvalidWord { reason: String },

    #[error("invalid-spec, {reason}")]
    InvalidSpec { reason: String },
}

impl Error {
    /// True for numerical failures (as opposed to rejected inputs).
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::ConvergenceFailure { .. })
    }

    pub(crate) fn domain(what: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain { what, value, expected }
    }

    pub(crate) fn convergence(context: impl Into<String>) -> Self {
        Error::ConvergenceFailure {
            context: context.into(),
        }
    }
}
