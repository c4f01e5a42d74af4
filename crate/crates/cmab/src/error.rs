use thiserror::Error;

/// Errors raised by bandit primitives and CMAB strategies.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CmabError {
    #[error("reward {0} outside [-1, 1]")]
    RewardOutOfRange(f64),
    #[error("selection over an empty arm list")]
    EmptyArms,
    #[error("exploration constant must be non-negative, got {0}")]
    NegativeExploration(f64),
    #[error("budget {budget} cannot sample each of {candidates} candidates once")]
    BudgetTooSmall { budget: u64, candidates: usize },
    #[error("legal macro-arm count exceeds the enumeration cap of {cap}")]
    EnumerationCap { cap: u64 },
    #[error("strategy has not sampled any macro-arm yet")]
    NotInitialized,
    #[error("no legal completion exists for variable {variable}")]
    NoLegalCompletion { variable: usize },
    #[error("could not generate any legal candidate macro-arm")]
    DegenerateProblem,
    #[error("parameter {name} out of range: {value}")]
    InvalidParam { name: &'static str, value: f64 },
    #[error("strategy `{strategy}` cannot be used here: {reason}")]
    UnsupportedStrategy {
        strategy: String,
        reason: &'static str,
    },
    #[error("bad strategy spec at `{token}`: {reason}")]
    BadSpec { token: String, reason: String },
}

pub type Result<T> = std::result::Result<T, CmabError>;
