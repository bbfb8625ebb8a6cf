use cqed_core::units::angular;
use cqed_core::{adiabatic_coeffs, emission_efficiency, CqedParams, LevelScheme};
use pulse_shaper::{emission_control, mode_fidelity, ControlPulse, PulseOptions, TemporalMode};
use serde::{Deserialize, Serialize};

use crate::evolve::{evolve, SimConfig, SimResult};
use crate::space::{build_space, Polarization};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionOptions {
    pub pulse: PulseOptions,
    /// Simulated time after the last pulse sample, µs. `None` waits ten
    /// 1/e times of the slower of cavity and atomic decay.
    pub extension: Option<f64>,
    pub integrator: String,
    pub step: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for EmissionOptions {
    fn default() -> Self {
        Self { pulse: PulseOptions::default(), extension: None, integrator: "rk4".into(), step: None, rtol: 1e-8, atol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionReport {
    pub delta: f64,
    /// Out-coupled probability in the signal polarization (σ⁻).
    pub efficiency: f64,
    /// Out-coupled probability in the other polarization (σ⁺).
    pub wrong_polarization: f64,
    pub lost: f64,
    /// Out-coupled probability of the branch without spontaneous emission.
    pub coherent_efficiency: f64,
    /// Share of all out-coupled light that is not in the coherent mode.
    pub incoherent_fraction: f64,
    pub analytic_efficiency: f64,
    /// Fidelity of the coherent out-field with the target mode.
    pub fidelity: f64,
    /// (Σ √flux_σ⁻ · |e| dt)² / Σ flux_σ⁻ dt: shape agreement of the detected
    /// σ⁻ intensity including incoherent light.
    pub intensity_fidelity: f64,
    pub max_trace_drift: f64,
    pub pulse: ControlPulse,
    /// Coherent out-field, normalized, on the pulse grid extended past its end.
    pub emitted_mode: Option<TemporalMode>,
    pub result: SimResult,
}

/// Synthesizes the emission pulse for `target`, runs the master equation and
/// compares the outcome with the adiabatic prediction.
pub fn emission_experiment(params: &CqedParams, scheme: &LevelScheme, target: &TemporalMode, opts: &EmissionOptions) -> Result<EmissionReport> {
    let coeffs = adiabatic_coeffs(params, scheme)?;
    let pulse = emission_control(target, &coeffs, &opts.pulse)?;
    let analytic_efficiency = emission_efficiency(params, scheme)?.value;
    run_pulse(params, scheme, target, pulse, analytic_efficiency, opts)
}

/// Same as [`emission_experiment`] with a given pulse.
pub fn run_pulse(params: &CqedParams, scheme: &LevelScheme, target: &TemporalMode, pulse: ControlPulse, analytic_efficiency: f64, opts: &EmissionOptions) -> Result<EmissionReport> {
    let space = build_space(scheme);
    let extension = opts.extension.unwrap_or_else(|| 10.0 / angular(params.kappa().min(params.gamma)));
    let extra = (extension / pulse.dt).ceil() as usize;
    let mut config = SimConfig::for_pulse(&pulse, extra);
    config.integrator = opts.integrator.clone();
    config.step = opts.step;
    config.rtol = opts.rtol;
    config.atol = opts.atol;
    let result = evolve(&space, params, scheme, &config)?;

    let efficiency = result.efficiency(Polarization::SigmaMinus);
    let wrong_polarization = result.efficiency(Polarization::SigmaPlus);
    let lost = result.lost.iter().map(|l| l.last().copied().unwrap_or(0.0)).sum();
    let coherent_efficiency = result.coherent_efficiency();
    let total = efficiency + wrong_polarization;
    let incoherent_fraction = if total > 0.0 { (1.0 - coherent_efficiency / total).max(0.0) } else { 0.0 };

    let padded = target.zero_padded(extra);
    let emitted_mode = TemporalMode::normalized(padded.t0(), padded.dt(), result.coherent_amplitude.clone()).ok();
    let fidelity = match &emitted_mode {
        Some(m) => mode_fidelity(m, &padded)?,
        None => 0.0,
    };
    let flux = &result.flux_out[Polarization::SigmaMinus.index()];
    let flux_total: f64 = flux.iter().sum::<f64>() * padded.dt();
    let overlap: f64 = flux.iter().zip(padded.samples()).map(|(f, e)| f.max(0.0).sqrt() * e.norm()).sum::<f64>() * padded.dt();
    let intensity_fidelity = if flux_total > 0.0 { (overlap * overlap / flux_total).min(1.0) } else { 0.0 };

    Ok(EmissionReport {
        delta: scheme.delta,
        efficiency,
        wrong_polarization,
        lost,
        coherent_efficiency,
        incoherent_fraction,
        analytic_efficiency,
        fidelity,
        intensity_fidelity,
        max_trace_drift: result.max_trace_drift,
        pulse,
        emitted_mode,
        result,
    })
}
