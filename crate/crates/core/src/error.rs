use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("invalid cavity-QED parameter: {0}")]
    InvalidParams(String),
    #[error("invalid quantum number {0}: not a half-integer")]
    InvalidQuantumNumber(f64),
    #[error("reference data: {0}")]
    Configuration(String),
    #[error("degenerate denominator a1*a2 - b^2 = {re:e}{im:+e}i at detuning {delta} MHz")]
    DegenerateDenominator { delta: f64, re: f64, im: f64 },
    #[error("Re(K) = {0:e} is not positive; the storage state is not coupled")]
    UncoupledStorage(f64),
    #[error("sweep needs at least two points and a non-empty range")]
    InvalidSweep,
}
