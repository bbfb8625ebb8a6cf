use cqed_core::{adiabatic_coeffs, emission_efficiency};
use pulse_shaper::io::{mode_to_csv, pulse_to_csv};
use pulse_shaper::{emission_control, spin_wave, storage_control, ControlPulse, Direction, SpinWaveTrajectory, TemporalMode};
use serde::Serialize;

use super::{csv, Command, Context};
use crate::config::ExperimentConfig;
use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub struct ShapeSummary {
    pub direction: &'static str,
    pub delta_mhz: f64,
    pub compensated: bool,
    pub analytic_efficiency: f64,
    /// ∫|E_out|² of the adiabatic solution (emission only).
    pub predicted_emission: Option<f64>,
    pub chirp_coefficient: f64,
    pub clamp_onset: Option<usize>,
    pub saturated_samples: usize,
    pub max_omega_mhz: f64,
}

pub struct ShapeReport {
    pub target: TemporalMode,
    pub pulse: ControlPulse,
    pub flux: Option<SpinWaveTrajectory>,
    pub summary: ShapeSummary,
}

pub fn run_shape(cfg: &ExperimentConfig, compensate: bool) -> Result<ShapeReport> {
    let params = cfg.cqed_params()?;
    let scheme = cfg.model_scheme()?;
    let coeffs = adiabatic_coeffs(&params, &scheme)?;
    let target = cfg.shape.mode()?;
    let opts = pulse_shaper::PulseOptions { compensate_phase: compensate, ..cfg.pulse.options() };
    let direction: Direction = cfg.shape.direction.into();
    let pulse = match direction {
        Direction::Emission => emission_control(&target, &coeffs, &opts)?,
        Direction::Storage => storage_control(&target, &coeffs, &opts)?,
    };
    let flux = (direction == Direction::Emission).then(|| spin_wave(&pulse, &coeffs, &params)).transpose()?;
    let summary = ShapeSummary {
        direction: match direction {
            Direction::Emission => "emission",
            Direction::Storage => "storage",
        },
        delta_mhz: scheme.delta,
        compensated: compensate,
        analytic_efficiency: emission_efficiency(&params, &scheme)?.value,
        predicted_emission: flux.as_ref().map(|f| f.emitted_probability()),
        chirp_coefficient: coeffs.chirp_coefficient(),
        clamp_onset: pulse.clamp_onset,
        saturated_samples: pulse.saturated,
        max_omega_mhz: pulse.max_abs_omega(),
    };
    Ok(ShapeReport { target, pulse, flux, summary })
}

pub struct Shape;

impl Command for Shape {
    fn name(&self) -> &'static str {
        "shape"
    }

    fn about(&self) -> &'static str {
        "Control pulse and predicted out-field for a target photon shape"
    }

    fn args(&self) -> Vec<clap::Arg> {
        vec![clap::Arg::new("no-compensation")
            .long("no-compensation")
            .action(clap::ArgAction::SetTrue)
            .help("Leave the light-shift chirp in the pulse")]
    }

    fn run(&self, ctx: &mut Context<'_>) -> Result<()> {
        let compensate = ctx.config.pulse.compensate && !ctx.args.get_flag("no-compensation");
        let r = run_shape(ctx.config, compensate)?;
        ctx.out.write("target.csv", mode_to_csv(&r.target))?;
        ctx.out.write("pulse.csv", pulse_to_csv(&r.pulse))?;
        if let Some(f) = &r.flux {
            let rows = f.flux_out.iter().zip(&f.s).enumerate().map(|(j, (e, s))| vec![f.t0 + j as f64 * f.dt, e.re, e.im, e.norm_sqr(), s.re, s.im]);
            ctx.out.write("flux.csv", csv(&["t", "e_re", "e_im", "flux", "s_re", "s_im"], rows))?;
        }
        ctx.out.write_json("shape.json", &r.summary)
    }
}
