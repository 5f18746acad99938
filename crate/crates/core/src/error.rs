use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain an operation is defined on
    /// (nonpositive mean argument, skew parameter outside `[0,1]`,
    /// natural parameter outside the family's domain, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The integration budget ran out before the requested tolerance was
    /// met. Carries the partial estimate so callers can decide whether it
    /// is still usable.
    #[error("integration budget exceeded after {nodes} nodes: partial value {partial} (estimated error {abs_error})")]
    BudgetExceeded {
        partial: f64,
        abs_error: f64,
        nodes: usize,
    },

    /// The integrand returned NaN or +/-inf. Carries the offending node in
    /// original (untransformed) coordinates.
    #[error("integrand is not finite at {node:?}")]
    NonFiniteIntegrand { node: Vec<f64> },

    /// A mixture normalizer failed to converge or came out nonpositive
    /// (e.g. power means with exponent > 1 on heavy-tailed densities).
    #[error("mixture normalizer did not converge: {0}")]
    DivergentNormalizer(String),

    /// Inputs were degenerate for the requested operation (coincident
    /// densities handed to the Chernoff solver, a singular Hessian, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A mean that was required to dominate the arithmetic mean failed the
    /// sampled dominance check at the given grid point.
    #[error("mean does not dominate the arithmetic mean at (x={x}, y={y}, alpha={alpha})")]
    DominanceViolation { x: f64, y: f64, alpha: f64 },

    /// A matrix that must be symmetric positive-definite was not
    /// (Cholesky factorization failed or the asymmetry gate tripped).
    #[error("matrix is not symmetric positive-definite: {0}")]
    NotPositiveDefinite(String),

    /// Inverting the gradient of a log-normalizer failed (no closed form
    /// and the 1D bisection fallback does not apply or did not bracket).
    #[error("gradient inversion failed: {0}")]
    GradientInversion(String),

    /// A density without a sampler was used where Monte Carlo sampling is
    /// required (d >= 2 oracle integrals).
    #[error("density cannot be sampled: {0}")]
    NoSampler(String),

    /// A serialized density/parameter descriptor could not be validated.
    #[error("invalid descriptor: {0}")]
    Descriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;
