use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("index {index} out of range for {context} of size {size}")]
    OutOfRange {
        context: &'static str,
        index: usize,
        size: usize,
    },

    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error("decoding failed at step {step} after {retries} weight escalations")]
    DecodeFailure { step: usize, retries: usize },

    #[error("oracle budget exceeded: {what} = {value} > {limit}")]
    Budget {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("malformed code descriptor: {0}")]
    Descriptor(String),

    #[error("message of {needed} bytes exceeds cover capacity of {max_bytes} bytes")]
    Capacity { needed: usize, max_bytes: usize },

    #[error("stego framing is corrupt: {0}")]
    Integrity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension {
            context,
            expected,
            found,
        })
    }
}
