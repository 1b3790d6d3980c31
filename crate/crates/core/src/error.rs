use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("reaction {0} has identical source and product")]
    SelfLoop(String),
    #[error("network has no reactions")]
    EmptyNetwork,
    #[error("negative stoichiometric coefficient for species {0}")]
    NegativeCoefficient(String),
    #[error("species {0} does not appear in any complex")]
    UnusedSpecies(String),
    #[error("duplicate species name {0}")]
    DuplicateSpecies(String),
    #[error("duplicate reaction {0}")]
    DuplicateReaction(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("rate constant must be positive: {0}")]
    NegativeRate(String),
    #[error("rate assignment does not match the network ({0})")]
    RateMismatch(String),

    #[error("too many species for exhaustive siphon search: {0} > 20")]
    TooManySpecies(usize),
    #[error("projection leaves no reactions")]
    EmptyProjection,
    #[error("reaction {0} is not part of the network")]
    UnknownReaction(String),

    #[error("enumeration budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("direction vector is orthogonal to the stoichiometric subspace")]
    OrthogonalToS,
    #[error("flag contains a zero direction")]
    ZeroDirection,
    #[error("floating point overflow: {0}")]
    Overflow(String),

    #[error("state has a negative coordinate")]
    NegativeState,
    #[error("integration failed: {0}")]
    ToleranceFailure(String),
    #[error("point is not on the grid of volume {0}")]
    DomainError(f64),
    #[error("cycle cannot be repeated: {0}")]
    CycleInfeasible(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
