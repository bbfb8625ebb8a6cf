use cqed_core::units::angular;
use cqed_core::{AdiabaticCoeffs, CqedParams};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::pulse::{ControlPulse, Direction};
use crate::{Result, ShaperError};

/// Storage-state amplitude and out-field of the adiabatic solution on the
/// pulse grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinWaveTrajectory {
    pub t0: f64,
    pub dt: f64,
    pub s: Vec<Complex64>,
    /// Out-coupled field amplitude, µs^-½.
    pub flux_out: Vec<Complex64>,
}

impl SpinWaveTrajectory {
    /// ∫|E_out|² dt, rectangle rule.
    pub fn emitted_probability(&self) -> f64 {
        self.flux_out.iter().map(|f| f.norm_sqr()).sum::<f64>() * self.dt
    }

    /// Cumulative Σ_{k≤j} |E_out|² dt.
    pub fn cumulative_emission(&self) -> Vec<f64> {
        self.flux_out
            .iter()
            .scan(0.0, |acc, f| {
                *acc += f.norm_sqr() * self.dt;
                Some(*acc)
            })
            .collect()
    }
}

/// S(t) = exp(−K h(t)) and E_out = √η_esc · L · Ω · S, starting from S = 1.
/// Only emission pulses are supported.
pub fn spin_wave(pulse: &ControlPulse, coeffs: &AdiabaticCoeffs, params: &CqedParams) -> Result<SpinWaveTrajectory> {
    if pulse.direction != Direction::Emission {
        return Err(ShaperError::Unsupported("spin-wave trajectory of a storage pulse".into()));
    }
    let prefactor = params.escape_efficiency().sqrt() * coeffs.scaled_l();
    let s: Vec<Complex64> = pulse.h.iter().map(|&h| (-coeffs.k * h).exp()).collect();
    let flux_out = s.iter().enumerate().map(|(j, s)| prefactor * pulse.omega[j] * angular(1.0) * s).collect();
    Ok(SpinWaveTrajectory { t0: pulse.t0, dt: pulse.dt, s, flux_out })
}
