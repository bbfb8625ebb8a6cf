//! Master-equation model of a single ⁸⁷Rb atom on the D₂ line coupled to two
//! orthogonally polarized cavity modes, driven by a shaped control pulse.
//!
//! Basis and truncation: 21 atomic states (F=1, F=2, and the 13 excited states
//! F'=1,2,3) times at most one photon per polarization mode, 84 states in
//! total. Starting from the storage state with an empty cavity, the dynamics
//! never leaves a 27-state sector (see [`space`]), so the density matrix is
//! propagated there. Photons leaving the cavity are counted by classical
//! out-coupled and lost accumulators instead of extra sink levels.
//!
//! Rates follow the workspace convention: linear MHz in parameters, angular
//! rates inside the equations of motion, time in µs.

mod error;
pub mod evolve;
pub mod experiment;
pub mod export;
pub mod integrate;
pub mod operators;
pub mod space;

pub use error::SimError;
pub use evolve::{evolve, step_bound, Drive, SimConfig, SimResult};
pub use experiment::{emission_experiment, run_pulse, EmissionOptions, EmissionReport};
pub use integrate::{Dopri5, Integrator, IntegratorRegistry, IntegratorSettings, OdeSystem, Rk4, StepStats};
pub use operators::{build_collapse_ops, build_hamiltonian, hamiltonian_parts, CollapseOp, CollapseTarget, CouplingCounts, HamiltonianParts, OperatorMatrix};
pub use space::{build_space, AtomLevel, BasisState, HilbertSpaceSpec, Polarization};

pub type Result<T, E = SimError> = std::result::Result<T, E>;
