use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("size cap exceeded: {what} would need {needed} (cap {cap})")]
    SizeCap {
        what: String,
        needed: usize,
        cap: usize,
    },
    #[error("index out of range: {0}")]
    Index(String),
    #[error("no stabilization: {0}")]
    NoStabilization(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn cap_check(what: &str, needed: usize, cap: usize) -> Result<()> {
    if needed > cap {
        return Err(Error::SizeCap {
            what: what.to_string(),
            needed,
            cap,
        });
    }
    Ok(())
}
