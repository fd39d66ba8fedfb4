use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("window error: {0}")]
    Window(String),
    #[error("positivity error: {0}")]
    Positivity(String),
    #[error("rank deficiency: {0}")]
    Rank(String),
    #[error("structure error: {0}")]
    Structure(String),
    #[error("truncation error: {0}")]
    Truncation(String),
    #[error("forbidden truncation condition: {0}")]
    ForbiddenCondition(String),
    #[error("degenerate spectrum: {0}")]
    Degeneracy(String),
}

impl Error {
    /// Short stable tag, used in reports and CLI messages.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::Singularity(_) => "SingularityError",
            Error::Window(_) => "WindowError",
            Error::Positivity(_) => "PositivityError",
            Error::Rank(_) => "RankError",
            Error::Structure(_) => "StructureError",
            Error::Truncation(_) => "TruncationError",
            Error::ForbiddenCondition(_) => "ForbiddenConditionError",
            Error::Degeneracy(_) => "DegeneracyError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
