//! Temporal-mode tomography from homodyne quadrature records.
//!
//! Records are shot-noise normalized: vacuum gives unit variance per time
//! bin. The correlation matrix of the records, in units of a vacuum
//! reference, has eigenvalues κ_i = 2n_i + 1. A vacuum/single-photon mixture
//! in one complex mode occupies at most two eigenfunctions, from which the
//! mode is rebuilt up to complex conjugation.

pub mod budget;
pub mod correlation;
pub mod decompose;
mod error;
pub mod export;
pub mod reconstruct;
pub mod records;
pub mod stats;
pub mod synth;

pub use budget::{loss_budget, setup_chain, LossBudget, Stage};
pub use correlation::{autocorrelation, Correlation};
pub use decompose::{decompose, ModeDecomposition};
pub use error::HomodyneError;
pub use reconstruct::{reconstruct_mode, ReconstructOptions, ReconstructedMode, Threshold};
pub use records::{read_records, records_from_csv, records_to_csv, write_records, Grid, QuadratureRecords, MIN_TRIALS};
pub use stats::{photon_stats, photon_stats_in_mode, source_brightness, FitOptions, PhotonStats};
pub use synth::{synth_records, Generator, ModeSpan, SynthOptions};

pub type Result<T, E = HomodyneError> = std::result::Result<T, E>;
