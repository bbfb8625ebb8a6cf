use lindblad_sim::export::{result_to_csv, Summary};
use lindblad_sim::{emission_experiment, run_pulse, EmissionReport};
use pulse_shaper::io::pulse_to_csv;

use super::{Command, Context};
use crate::config::ExperimentConfig;
use crate::Result;

/// Full master-equation emission run for the configured shape and detuning.
pub fn run_emit(cfg: &ExperimentConfig) -> Result<EmissionReport> {
    let params = cfg.cqed_params()?;
    let scheme = cfg.model_scheme()?;
    let target = cfg.shape.mode()?;
    let opts = cfg.simulation.emission_options(&cfg.pulse);
    let mut report = emission_experiment(&params, &scheme, &target, &opts)?;
    if cfg.pulse.zero_drive {
        report = run_pulse(&params, &scheme, &target, report.pulse.zeroed(), report.analytic_efficiency, &opts)?;
    }
    Ok(report)
}

pub struct Emit;

impl Command for Emit {
    fn name(&self) -> &'static str {
        "emit"
    }

    fn about(&self) -> &'static str {
        "Master-equation emission run with polarization-resolved output"
    }

    fn run(&self, ctx: &mut Context<'_>) -> Result<()> {
        let r = run_emit(ctx.config)?;
        ctx.out.write("pulse.csv", pulse_to_csv(&r.pulse))?;
        ctx.out.write("emission.csv", result_to_csv(&r.result))?;
        ctx.out.write_json("emission.json", &Summary::from(&r))
    }
}
