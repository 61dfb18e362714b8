use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DpathError {
    #[error("search budget of {budget} nodes exhausted")]
    BudgetExhausted { budget: u64 },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("not a path of the supply graph: {0:?}")]
    NotAPath(Vec<usize>),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("demand is not a complete biclique: {0} and {1} are not adjacent")]
    NotBiclique(usize, usize),
    #[error("no element of the path family lies in the region")]
    NoPElement,
    #[error("input exceeds the supported size: {0}")]
    TooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("reduction not applicable: {0}")]
    NotApplicable(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, DpathError>;
