//! Error type shared by every module in the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while constructing parameters, summing
/// series, or running a verification suite.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Parameter values outside the admissible domain (q range, unit disk,
    /// malformed budgets, bad CLI input).
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// A denominator factor of a closed form or weight vanishes (or nearly
    /// vanishes) for these parameters.
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    /// A denominator q-Pochhammer factor vanishes before the series
    /// terminates.
    #[error("pole in series: factor 1 - ({0}) vanishes")]
    PoleInSeries(String),

    /// A transformation that requires a balanced series was handed an
    /// unbalanced one.
    #[error("balance violation: {0}")]
    BalanceViolation(String),

    /// No upper parameter of the form q^-n was found.
    #[error("series does not terminate")]
    NonTerminating,

    /// Laurent division left a remainder above tolerance. For operator
    /// applications this signals a violated stability claim.
    #[error("inexact division: relative remainder {remainder:e} exceeds {tol:e}")]
    InexactDivision { remainder: f64, tol: f64 },

    /// Evaluation point too close to a removable singularity of a rational
    /// weight factor.
    #[error("evaluation too close to a singular point of the weight")]
    NearSingularPoint,

    /// Node doubling exhausted without meeting the Cauchy criterion.
    #[error("quadrature did not converge: {0}")]
    NoConvergence(String),

    /// Least-squares decay rate violates the expected bound.
    #[error("insufficient decay: fitted slope {slope} exceeds bound {bound}")]
    InsufficientDecay { slope: f64, bound: f64 },

    /// A discrete weight denominator vanishes.
    #[error("degenerate discrete weight: {0}")]
    DegenerateWeight(String),

    /// An operation that requires unit-disk parameters was called with a
    /// relaxed parameter set.
    #[error("domain violation: {0}")]
    DomainViolation(String),
}
