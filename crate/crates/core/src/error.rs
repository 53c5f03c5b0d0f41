use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse rational {0:?} (expected \"p/q\" or an integer)")]
    ParseRational(String),

    #[error("invalid breakpoints: {0}")]
    InvalidBreakpoints(String),
    #[error("expected {expected} densities, got {got}")]
    DensityCountMismatch { expected: usize, got: usize },
    #[error("negative density {0}")]
    NegativeDensity(Rational),
    #[error("invalid interval [{0}, {1})")]
    InvalidInterval(Rational, Rational),
    #[error("regions do not cover [{0}, {1})")]
    UncoveredRegion(Rational, Rational),

    #[error("requested value {requested} exceeds remaining value {remaining}")]
    RequestExceedsRemaining {
        requested: Rational,
        remaining: Rational,
    },
    #[error("agent {agent} has zero total value")]
    ZeroTotalValue { agent: usize },

    #[error("{valuations} valuations but {shares} shares")]
    AgentCountMismatch { valuations: usize, shares: usize },
    #[error("shares {first} and {second} overlap on a set of positive length")]
    OverlappingShares { first: usize, second: usize },
    #[error("mechanism needs {expected} agents, got {got}")]
    WrongAgentCount { expected: usize, got: usize },
    #[error("need at least {min} agents, got {got}")]
    TooFewAgents { min: usize, got: usize },
    #[error("unknown mechanism {0:?}")]
    UnknownMechanism(String),

    #[error("profile mismatch: {0}")]
    ProfileMismatch(String),
    #[error("deviation is identical to the true valuation")]
    IdenticalReport,
    #[error("eps {0} outside the allowed range")]
    EpsOutOfRange(Rational),
    #[error("eps {0} is too large")]
    EpsTooLarge(Rational),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("invalid search grid: {0}")]
    InvalidGrid(String),
    #[error("search space is empty")]
    SearchSpaceEmpty,

    #[error("gadget state incomplete: {0} not yet recorded")]
    StateIncomplete(&'static str),
    #[error("black-box mechanism failed: {0}")]
    Mechanism(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
