//! Crate-wide error type.
//!
//! Numerical routines here fail loudly rather than returning garbage: mode
//! sums that did not converge, quadratures that stalled, fits that are too
//! ill-conditioned to trust.  Each variant carries enough context to act on
//! (the offending value, the worst subinterval, a grid suggestion, …).

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Geometry parameters out of range (dimension, circle length, …).
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// A spectrum file failed to parse.
    #[error("spectrum parse error at line {line}: {msg}")]
    SpectrumParse { line: usize, msg: String },

    /// A spectrum violated its ordering/positivity contract.
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    /// Function argument outside the supported domain.
    #[error("domain error in {context}: {msg}")]
    Domain { context: &'static str, msg: String },

    /// Evaluation at or too close to a pole.
    #[error("pole of {context} at {location} (order {order})")]
    Pole {
        context: &'static str,
        location: f64,
        order: usize,
    },

    /// A series or mode sum hit its term cap before meeting its tolerance.
    #[error("{context}: not converged after {terms} terms (last term {last_term:.3e}, target {target:.3e})")]
    NotConverged {
        context: &'static str,
        terms: usize,
        last_term: f64,
        target: f64,
    },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature did not converge: error estimate {estimate:.3e} > target {target:.3e}; worst subinterval [{worst_lo:.6e}, {worst_hi:.6e}]")]
    QuadratureNonConvergence {
        estimate: f64,
        target: f64,
        worst_lo: f64,
        worst_hi: f64,
    },

    /// Pointwise kernel evaluation requested on (or too near) the diagonal
    /// where the mode sum diverges or converges too slowly.
    #[error("kernel evaluation too close to the diagonal: {0}")]
    DiagonalSingularity(String),

    /// The operation needs a pointwise mode kernel on the cross-section, but
    /// the spectrum only carries multiplicities (e.g. loaded from a file).
    #[error("no pointwise mode kernel available: {0}")]
    NoModeKernel(String),

    /// Contour integrand fails to decay along the requested rays.
    #[error("contour rays do not decay: {0}")]
    NonDecayingRay(String),

    /// A least-squares fit was too ill-conditioned to report coefficients.
    #[error("ill-conditioned fit (condition estimate {condition:.3e}): {suggestion}")]
    IllConditionedFit { condition: f64, suggestion: String },

    /// Sampled data rejected the asymptotic model being fit.
    #[error("no clean leading order: {0}")]
    NoCleanOrder(String),

    /// Zeta evaluation requested at (or within guard distance of) a pole.
    #[error("zeta evaluated too close to a pole at s = {location} (order {order})")]
    ZetaPole { location: f64, order: usize },

    /// The zeta function has a pole at s = 0, so the determinant is undefined.
    #[error("determinant undefined: zeta has residue {residue:.6e} at s = 0")]
    UndefinedDeterminant { residue: f64 },

    /// Invalid user-supplied configuration value.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
