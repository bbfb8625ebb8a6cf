//! Cavity-QED core: physical parameters, dipole coupling coefficients and the
//! adiabatic model of single-photon emission and absorption in a Raman
//! Λ-system with up to three excited hyperfine manifolds.
//!
//! Frequencies (g, κ, γ, Δ, Rabi frequencies) are stored as linear frequencies
//! in MHz. The factor 2π is applied only where a formula needs angular rates,
//! via [`units::angular`]. Times are in µs.

pub mod adiabatic;
pub mod angular;
pub mod efficiency;
mod error;
pub mod params;
pub mod reference;
pub mod scheme;
pub mod units;

pub use adiabatic::{adiabatic_coeffs, AdiabaticCoeffs};
pub use angular::{dipole_coefficient, wigner_3j, wigner_6j, wigner_coupling, DipoleTransition, HalfInt};
pub use efficiency::{efficiency_sweep, emission_efficiency, parabolic_vertex, raman_limit, Efficiency, EfficiencyCurve, SweepPoint};
pub use error::CoreError;
pub use params::CqedParams;
pub use reference::ReferenceData;
pub use scheme::{build_scheme, CouplingTable, DecayChannel, LevelScheme, ModelVariant, TWO_PHOTON_DETUNING};

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
