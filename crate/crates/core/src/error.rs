use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpcatError {
    #[error("source/target mismatch: {0}")]
    Mismatch(String),
    #[error("{obj} is not an object of {cat}")]
    NotAnObject { obj: String, cat: String },
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("{0} is not a perfect operator category")]
    NotPerfect(String),
    #[error("expected exactly one solution for {context}, found {found}")]
    Uniqueness { context: String, found: usize },
    #[error("interval inclusions of {0} are only validated against a supplied witness")]
    RecognitionUnsupported(String),
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("invalid sequence data: {0}")]
    InvalidSequence(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("functor does not apply: {0}")]
    Functor(String),
}

pub type Result<T> = std::result::Result<T, OpcatError>;

/// Returns the single element of `found`, or a uniqueness error.
pub(crate) fn exactly_one<T>(mut found: Vec<T>, context: impl FnOnce() -> String) -> Result<T> {
    if found.len() == 1 {
        Ok(found.pop().unwrap())
    } else {
        Err(OpcatError::Uniqueness {
            context: context(),
            found: found.len(),
        })
    }
}
