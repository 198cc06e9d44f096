use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: rating {rating} outside scale [{min}, {max}]")]
    RatingOutOfRange {
        line: usize,
        rating: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid format spec: {0}")]
    Format(String),

    #[error("no links survive rating threshold {threshold}")]
    EmptyGraph { threshold: f64 },

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("algorithm {algorithm} does not take parameters")]
    UnexpectedParams { algorithm: String },

    #[error("algorithm {algorithm} requires (eta1, eta2) parameters")]
    MissingParams { algorithm: String },

    #[error("{kind} index {index} out of range (size {size})")]
    IndexOutOfRange {
        kind: &'static str,
        index: usize,
        size: usize,
    },

    #[error("cannot split {links} links into {folds} folds")]
    TooManyFolds { folds: usize, links: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("training graph for fold {fold} has no links")]
    EmptyTrainingGraph { fold: usize },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
