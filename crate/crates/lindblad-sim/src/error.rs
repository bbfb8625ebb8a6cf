use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("operator leaves the simulated sector: {0}")]
    SectorNotClosed(String),
    #[error("operator is not Hermitian (residual {0:e})")]
    NotHermitian(f64),
    #[error("decay branching of {0} sums to {1}, expected 1")]
    Branching(String, f64),
    #[error("integrator failure at t = {time} µs: {reason}")]
    IntegratorFailure { time: f64, reason: String },
    #[error("unknown integrator `{0}`")]
    UnknownIntegrator(String),
    #[error(transparent)]
    Core(#[from] cqed_core::CoreError),
    #[error(transparent)]
    Shaper(#[from] pulse_shaper::ShaperError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
