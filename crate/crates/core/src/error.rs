use thiserror::Error;

/// Syntax error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub msg: String,
    pub line: usize,
    pub col: usize,
}

impl ParseError {
    pub fn new(msg: impl Into<String>, line: usize, col: usize) -> Self {
        ParseError { msg: msg.into(), line, col }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("arrow endpoints do not match: {0}")]
    EndpointMismatch(String),
    #[error("maps have different sources")]
    MixedSources,
    #[error("no generator slot in ({0}); use the full product instead")]
    UnsupportedShape(String),
    #[error("pair is not covered by a tabulated product formula")]
    NotTabulated,
    #[error("words have different degree vectors")]
    UnequalDegree,
    #[error("unknown constant name `{0}`")]
    UnknownConstant(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("rewriting stalled on non-normal word {0}")]
    Stalled(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
