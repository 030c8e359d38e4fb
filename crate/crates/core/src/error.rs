use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument is inside the domain but rejected by an operational guardrail.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An adaptive quadrature did not reach its requested tolerance.
    #[error("quadrature did not converge: estimated error {achieved:.3e} exceeds requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },

    /// An extended-precision series lost too many digits to cancellation.
    #[error(
        "insufficient precision: {digits} digits cannot resolve a sum {cancellation:.3e} times \
         smaller than its largest term; raise the precision or use the Monte Carlo backend"
    )]
    PrecisionInsufficient { digits: u32, cancellation: f64 },

    /// A probability evaluated outside of (0, 1).
    #[error("predictive weight {value} outside (0, 1); raise the precision or use the Monte Carlo backend")]
    OutOfRange { value: f64 },

    /// A problem too large for the deterministic quadrature path.
    #[error("n = {n} exceeds the quadrature size bound {limit}")]
    TooLarge { n: u64, limit: u64 },

    /// An internal invariant was violated.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
