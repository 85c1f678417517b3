use thiserror::Error;

/// Errors raised while validating or evaluating a design.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("matrix is not positive semidefinite (pivot {pivot}, value {value:e})")]
    NotPositiveSemidefinite { pivot: usize, value: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid selection rule: {0}")]
    InvalidRule(String),

    #[error("invalid test configuration: {0}")]
    InvalidTest(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// True for failures of the numerical model rather than of user input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NotPositiveSemidefinite { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
