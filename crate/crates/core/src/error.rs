//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Money component does not exceed the agent's money floor.
    #[error("consumption money {money} is not above the floor {floor}")]
    InfeasibleConsumption { money: String, floor: String },
    /// A bundle outside the agent's feasible set was supplied.
    #[error("bundle {0} is not in the feasible set")]
    InfeasibleBundle(String),
    /// A utility level of the wrong kind, or outside the valid range, was supplied.
    #[error("utility level {0} is invalid for this agent")]
    LevelOutOfRange(String),
    /// The total endowment cannot be split across the agents' feasible sets.
    #[error("total endowment admits no allocation across the agents' feasible sets")]
    NoEndowmentAllocation,
    /// A valuation was constructed over an empty domain.
    #[error("feasible set is empty")]
    EmptyFeasibleSet,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// Tabulated-family valuations must decrease strictly, pointwise, in the level.
    #[error("valuations are not strictly pointwise decreasing in the utility level")]
    NotStrictlyDecreasing,
    /// Tabulated-family valuations must share one domain.
    #[error("valuations in a family must share the same domain")]
    MismatchedDomains,
    /// Grid levels of a tabulated family must increase strictly.
    #[error("utility levels of a family must be strictly increasing")]
    LevelsNotIncreasing,
    /// Quasilog quasivaluations must be strictly negative everywhere.
    #[error("quasilog quasivaluation must take strictly negative values")]
    NotNegativeValued,
    /// The operation is defined for domains contained in {0,1}^n only.
    #[error("feasible set is not contained in {{0,1}}^n")]
    NotUnitBounded,
    /// Unit unpacking requires nonnegative quantities.
    #[error("feasible set contains negative quantities")]
    NegativeQuantities,
    /// A substitutes counterexample was requested for a substitutes valuation.
    #[error("valuation is substitutes; no counterexample exists")]
    IsActuallySubstitutes,
    /// A unimodularity counterexample was requested for a unimodular set.
    #[error("vector set is unimodular; no counterexample exists")]
    SubsetUnimodular,
    /// The vectors supplied were expected to be linearly independent.
    #[error("vectors are not linearly independent")]
    NotLinearlyIndependent,
    /// `support_pareto` requires a Pareto-efficient profile.
    #[error("consumption profile is not Pareto efficient")]
    NotParetoEfficient,
    /// An enumeration would exceed the configured combinatorial budget.
    #[error("enumeration of {size} combinations exceeds the cap of {cap}")]
    EnumerationCap { size: u128, cap: u128 },
    /// Malformed textual input (rationals, bundles, documents).
    #[error("parse error: {0}")]
    Parse(String),
    /// A vector set contained the zero vector or a non-primitive vector.
    #[error("demand-type vectors must be nonzero and primitive: {0}")]
    NotPrimitive(String),
}

pub type Result<T> = std::result::Result<T, Error>;
