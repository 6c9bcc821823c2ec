use thiserror::Error;

/// Failure classes shared by every module.
///
/// The CLI maps [`Error::Consistency`] to exit status 3 and every other
/// variant to exit status 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operands live in different factors or have the wrong length.
    #[error("structural mismatch: {0}")]
    Structural(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A computed object failed one of its own invariants.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn is_consistency(&self) -> bool {
        matches!(self, Error::Consistency(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! bail {
    ($variant:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$variant(format!($($arg)*)))
    };
}
pub(crate) use bail;
