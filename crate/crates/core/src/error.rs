use thiserror::Error;

/// Failure modes shared by every module.
///
/// `Capacity` and `Guard` both mean "refused before doing the work", but
/// `Capacity` is a hard structural ceiling while `Guard` is a configured
/// cutoff the caller can raise.
#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {what} = {got}, hard limit {limit}")]
    Capacity {
        what: &'static str,
        got: u64,
        limit: u64,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("resource guard: {what} = {got}, configured maximum {limit}")]
    Guard {
        what: &'static str,
        got: u64,
        limit: u64,
    },

    /// An iterative routine did not converge; `best` carries the last
    /// estimate so a caller can still report something.
    #[error("numeric failure: {context}")]
    Numeric { context: String, best: Option<f64> },
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn numeric(context: impl Into<String>, best: Option<f64>) -> Self {
        Error::Numeric {
            context: context.into(),
            best,
        }
    }
}
