use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the semantic communication toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no tokens remain after normalizing {0:?}")]
    EmptySentence(String),
    #[error("corpus {0} contains no sentences")]
    EmptyCorpus(String),
    #[error("unknown template set {0:?}")]
    UnknownTemplateSet(String),
    #[error("malformed template set: {0}")]
    MalformedTemplateSet(String),
    #[error("keyword list is empty after normalization")]
    EmptyKeywordList,
    #[error("mask length {mask} does not match sentence length {sentence}")]
    LengthMismatch { mask: usize, sentence: usize },
    #[error("keyword {0:?} is not in the codebook")]
    UnknownKeyword(String),
    #[error("knowledge base has no keywords")]
    EmptyKb,
    #[error("candidate list is empty")]
    EmptyCandidateList,
    #[error("language model proposed no candidate")]
    NoCandidate,
    #[error("q(x) = 0 where p(x) > 0 at index {0}")]
    AbsoluteContinuityViolation(usize),
    #[error("supports differ in size: {0} vs {1}")]
    SupportMismatch(usize, usize),
    #[error("gamma must be non-negative, got {0}")]
    NegativeGamma(f64),
    #[error("result list is empty")]
    EmptyResults,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed model file: {0}")]
    MalformedModel(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
