use thiserror::Error;

#[derive(Debug, Error)]
pub enum HomodyneError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
    #[error("need at least {min} trials, got {got}")]
    TooFewTrials { got: usize, min: usize },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("vacuum reference is not positive definite (smallest eigenvalue {0:e})")]
    VacuumNotPositive(f64),
    #[error("{count} eigenvalues above threshold: more than one occupied temporal mode")]
    Multimode { count: usize, eigenvalues: Vec<f64> },
    #[error("no eigenvalue above threshold: signal is indistinguishable from vacuum")]
    NoSignal,
    #[error("likelihood fit did not converge after {iterations} iterations")]
    FitDidNotConverge { iterations: usize },
    #[error("efficiency {value} of stage '{stage}' outside [0, 1]")]
    OutOfRange { stage: String, value: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Shaper(#[from] pulse_shaper::ShaperError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
