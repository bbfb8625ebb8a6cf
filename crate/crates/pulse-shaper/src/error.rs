use thiserror::Error;

#[derive(Debug, Error)]
pub enum ShaperError {
    #[error("invalid shape: {0}")]
    InvalidSpec(String),
    #[error("unknown shape family `{0}`")]
    UnknownFamily(String),
    #[error("window captures only {captured:.6} of the pulse energy (need 0.999)")]
    WindowTooSmall { captured: f64 },
    #[error("mode norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },
    #[error("Re K = {0} is not positive; the storage state is not coupled")]
    NonPositiveReK(f64),
    #[error("grids differ: {0}")]
    GridMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("malformed file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
