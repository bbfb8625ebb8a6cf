//! Single-photon temporal modes and the control pulses that emit or absorb
//! them in the adiabatic Raman model of [`cqed_core`].
//!
//! Times are in µs and mode amplitudes in µs^-½. Rabi frequencies are stored
//! as linear MHz like every other rate in the workspace; `h(t)` is kept in
//! angular units (rad²/µs) so that `S = exp(−K h)` holds without conversion.

mod error;
pub mod io;
pub mod mode;
pub mod pulse;
pub mod shape;
pub mod spin;

pub use error::ShaperError;
pub use mode::{mode_fidelity, selection_efficiency, time_reverse, TemporalMode};
pub use pulse::{chirp_phase, compensate_chirp, emission_control, storage_control, ControlPulse, Direction, PulseOptions};
pub use shape::{make_shape, make_shape_with, FamilySpec, PhaseJump, ShapeFamily, ShapeRegistry, ShapeSpec};
pub use spin::{spin_wave, SpinWaveTrajectory};

pub type Result<T, E = ShaperError> = std::result::Result<T, E>;

/// Smallest number of samples accepted for a mode.
pub const MIN_SAMPLES: usize = 16;

/// Tolerance of the normalization invariant Σ|e|²dt = 1.
pub const NORM_TOLERANCE: f64 = 1e-9;
