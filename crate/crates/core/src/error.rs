use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("legislator index {index} out of range for a legislature of size {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("self-loop on legislator {0}")]
    SelfLoop(usize),

    #[error("link weight {weight} on ({from}, {to}) is outside [0, 1]")]
    WeightOutOfRange { from: usize, to: usize, weight: f64 },

    #[error("party {0} has no legislators")]
    EmptyParty(&'static str),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("linear system is singular: {0}")]
    SingularSystem(&'static str),

    #[error("link ({0}, {1}) is already present")]
    LinkAlreadyPresent(usize, usize),

    #[error("rank-one update denominator 1 - beta * x = {0} is not positive")]
    DenominatorNonPositive(f64),

    #[error("complete-network denominator {0} is not positive")]
    DegenerateDenominator(f64),

    #[error("influence of legislator {index} is {value}, must be positive")]
    NonPositiveInfluence { index: usize, value: f64 },

    #[error("dual bisection failed: {0}")]
    BisectionFailure(&'static str),

    #[error("new network is not stronger than the base network")]
    NotStronger,

    #[error("{0} cross-party link(s) present; affective mode requires none")]
    CrossPartyLinksPresent(usize),

    #[error("alpha = {alpha} is not below the ceiling alpha_hat = {alpha_hat}")]
    AlphaTooLarge { alpha: f64, alpha_hat: f64 },

    #[error("modified influence disagrees with direct solve (max deviation {0:e})")]
    FormulaMismatch(f64),

    #[error("parties have equal unmodified influence; threshold undefined")]
    EqualInfluence,

    #[error("fixed-point iteration did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("brute-force search supports at most {max} legislators, got {n}")]
    TooManyLegislators { n: usize, max: usize },

    #[error("scenario parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of a numerical routine on otherwise well-formed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularSystem(_)
                | Error::DenominatorNonPositive(_)
                | Error::DegenerateDenominator(_)
                | Error::BisectionFailure(_)
                | Error::FormulaMismatch(_)
                | Error::NoConvergence(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
