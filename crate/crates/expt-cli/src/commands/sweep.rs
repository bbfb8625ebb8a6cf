use cqed_core::{efficiency_sweep, emission_efficiency, parabolic_vertex, EfficiencyCurve, LevelScheme};
use lindblad_sim::emission_experiment;
use rayon::prelude::*;
use serde::Serialize;

use super::{csv, Command, Context};
use crate::config::{ExperimentConfig, Variant};
use crate::{CliError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct VariantCurve {
    pub variant: &'static str,
    pub delta: Vec<f64>,
    /// `None` where the model is degenerate.
    pub efficiency: Vec<Option<f64>>,
    pub minimum: Option<(f64, f64)>,
    /// Refined minimum strictly between the F'=1 and F'=2 resonances.
    pub minimum_between_resonances: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpotCheck {
    pub delta: f64,
    pub coherent_efficiency: f64,
    pub efficiency: f64,
    pub analytic: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LindbladCheck {
    pub variant: &'static str,
    pub points: Vec<SpotCheck>,
    /// Parabolic vertex through the lowest spot check and its neighbours.
    pub lindblad_minimum: Option<(f64, f64)>,
    pub analytic_minimum: Option<(f64, f64)>,
    pub separation_mhz: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub curves: Vec<VariantCurve>,
    pub lindblad: Option<LindbladCheck>,
}

fn curve_for(cfg: &ExperimentConfig, variant: Variant) -> Result<(EfficiencyCurve, [f64; 3])> {
    let s = &cfg.sweep;
    match variant {
        Variant::Model(v) => {
            let curve = efficiency_sweep(&cfg.cqed_params()?, v, (s.start.0, s.stop.0), s.points, &cfg.reference()?)?;
            Ok((curve, cfg.reference()?.excited_offsets()?))
        }
        Variant::IdealLambda => {
            let params = cfg.cqed_params()?;
            let step = (s.stop.0 - s.start.0) / (s.points - 1) as f64;
            let points = (0..s.points)
                .map(|i| {
                    let delta = s.start.0 + step * i as f64;
                    let efficiency = emission_efficiency(&params, &LevelScheme::ideal_lambda(delta)).map(|e| e.value).map_err(|e| e.to_string());
                    cqed_core::SweepPoint { delta, efficiency }
                })
                .collect();
            Ok((EfficiencyCurve { variant: cqed_core::ModelVariant::OneLevel, points }, [0.0; 3]))
        }
    }
}

/// Analytic curves for every requested variant plus optional master-equation
/// spot checks of one variant.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let mut curves = Vec::new();
    let mut analytic_for_check = None;
    for &variant in &cfg.sweep.variants {
        let (curve, offsets) = curve_for(cfg, variant)?;
        let between = if offsets[1] > 0.0 { curve.refined_minimum_within(offsets[0], offsets[1]) } else { None };
        if variant == cfg.sweep.lindblad_variant {
            analytic_for_check = between;
        }
        curves.push(VariantCurve {
            variant: variant.name(),
            delta: curve.points.iter().map(|p| p.delta).collect(),
            efficiency: curve.points.iter().map(|p| p.efficiency.as_ref().ok().copied()).collect(),
            minimum: curve.minimum(),
            minimum_between_resonances: between,
        });
    }

    let lindblad = if cfg.sweep.lindblad_checks.is_empty() {
        None
    } else {
        let variant = cfg.sweep.lindblad_variant;
        if analytic_for_check.is_none() {
            let (curve, offsets) = curve_for(cfg, variant)?;
            analytic_for_check = curve.refined_minimum_within(offsets[0], offsets[1]);
        }
        let params = cfg.cqed_params()?;
        let target = cfg.shape.mode()?;
        let opts = cfg.simulation.emission_options(&cfg.pulse);
        let mut deltas: Vec<f64> = cfg.sweep.lindblad_checks.iter().map(|f| f.0).collect();
        deltas.sort_by(f64::total_cmp);
        let points = deltas
            .par_iter()
            .map(|&delta| {
                let scheme = cfg.scheme(variant, delta)?;
                let r = emission_experiment(&params, &scheme, &target, &opts)?;
                Ok(SpotCheck { delta, coherent_efficiency: r.coherent_efficiency, efficiency: r.efficiency, analytic: r.analytic_efficiency, fidelity: r.fidelity })
            })
            .collect::<Result<Vec<_>>>()?;
        let lindblad_minimum = lowest_vertex(&points);
        LindbladCheck {
            variant: variant.name(),
            separation_mhz: lindblad_minimum.zip(analytic_for_check).map(|(a, b)| (a.0 - b.0).abs()),
            points,
            lindblad_minimum,
            analytic_minimum: analytic_for_check,
        }
        .into()
    };
    Ok(SweepReport { curves, lindblad })
}

fn lowest_vertex(points: &[SpotCheck]) -> Option<(f64, f64)> {
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.delta, p.coherent_efficiency)).collect();
    let (i, _) = xy.iter().enumerate().min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))?;
    if i == 0 || i + 1 == xy.len() {
        return Some(xy[i]);
    }
    Some(parabolic_vertex(xy[i - 1], xy[i], xy[i + 1]))
}

pub struct SweepEfficiency;

impl Command for SweepEfficiency {
    fn name(&self) -> &'static str {
        "sweep-efficiency"
    }

    fn about(&self) -> &'static str {
        "Emission efficiency versus single-photon detuning for each model variant"
    }

    fn run(&self, ctx: &mut Context<'_>) -> Result<()> {
        let report = run_sweep(ctx.config)?;
        let first = report.curves.first().ok_or_else(|| CliError::Config("sweep.variants is empty".into()))?;
        let mut header = vec!["delta_mhz".to_string()];
        header.extend(report.curves.iter().map(|c| format!("eta_{}", c.variant)));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows = (0..first.delta.len()).map(|i| {
            let mut row = vec![first.delta[i]];
            row.extend(report.curves.iter().map(|c| c.efficiency[i].unwrap_or(f64::NAN)));
            row
        });
        ctx.out.write("efficiency.csv", csv(&header, rows))?;
        #[derive(Serialize)]
        struct Minima<'a> {
            variant: &'a str,
            minimum: Option<(f64, f64)>,
            minimum_between_resonances: Option<(f64, f64)>,
        }
        let minima: Vec<Minima> = report
            .curves
            .iter()
            .map(|c| Minima { variant: c.variant, minimum: c.minimum, minimum_between_resonances: c.minimum_between_resonances })
            .collect();
        ctx.out.write_json("minima.json", &minima)?;
        if let Some(check) = &report.lindblad {
            ctx.out.write_json("lindblad_checks.json", check)?;
        }
        Ok(())
    }
}
