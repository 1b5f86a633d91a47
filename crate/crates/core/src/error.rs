use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid letter {letter:?}: {reason}")]
    InvalidLetter { letter: String, reason: String },

    #[error("rank mismatch: expected {expected}, found {found}")]
    RankError { expected: usize, found: usize },

    #[error("invalid Nielsen generator: {0}")]
    InvalidGenerator(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("composite is not a train track map: {0}")]
    NotTrainTrack(String),

    #[error("no PNP-freeness certificate for this decomposition: {0}")]
    MissingCertificate(String),

    #[error("gluing specification rejected: {0}")]
    SpecError(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
