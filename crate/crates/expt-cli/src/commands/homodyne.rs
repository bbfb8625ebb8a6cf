use cqed_core::{adiabatic_coeffs, emission_efficiency, AdiabaticCoeffs};
use homodyne_modes::export::{decomposition_json, reconstruction_csv};
use homodyne_modes::{
    autocorrelation, decompose, photon_stats, reconstruct_mode, records_to_csv, synth_records, Correlation, FitOptions, Generator, Grid, HomodyneError,
    ModeDecomposition, PhotonStats, QuadratureRecords, ReconstructOptions, ReconstructedMode, SynthOptions, Threshold,
};
use pulse_shaper::{chirp_phase, mode_fidelity, TemporalMode};
use serde::Serialize;

use super::{Command, Context};
use crate::config::{ExperimentConfig, VacuumReference};
use crate::Result;

/// Independent substreams for the signal, vacuum and statistics records.
const VACUUM_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;
const STATS_STREAM: u64 = 0xc2b2_ae3d_27d4_eb4f;

#[derive(Debug, Clone, Serialize)]
pub struct HomodyneSummary {
    pub compensated: bool,
    pub delta_mhz: f64,
    pub p1: f64,
    pub trials: usize,
    pub n_bins: usize,
    pub seed: u64,
    pub chirp_coefficient: f64,
    /// Leading vacuum-normalized eigenvalues.
    pub eigenvalues: Vec<f64>,
    pub threshold_margin: f64,
    /// "ok", "no_signal" or "multimode".
    pub status: &'static str,
    pub significant: usize,
    pub photon_numbers: Option<(f64, f64)>,
    /// Best-branch fidelity with the injected (predicted emitted) mode.
    pub fidelity_injected: Option<f64>,
    /// Best-branch fidelity with the target shape.
    pub fidelity_target: Option<f64>,
    /// Fidelity with the target after removing the predicted light-shift
    /// phase from the reconstruction (best branch). Uncompensated runs only.
    pub fidelity_restored: Option<f64>,
    pub photon_stats: Option<PhotonStats>,
}

pub struct HomodyneReport {
    pub summary: HomodyneSummary,
    pub injected: TemporalMode,
    pub target: TemporalMode,
    pub records: QuadratureRecords,
    pub decomposition: ModeDecomposition,
    pub reconstruction: Option<ReconstructedMode>,
}

fn best(target: &TemporalMode, branches: &[TemporalMode; 2]) -> Result<f64> {
    let mut f: f64 = 0.0;
    for b in branches {
        f = f.max(mode_fidelity(target, b)?);
    }
    Ok(f)
}

/// Emitted mode predicted by the adiabatic model: the target itself with
/// compensation, or the target carrying the light-shift chirp without.
pub fn predicted_mode(target: &TemporalMode, coeffs: &AdiabaticCoeffs, compensate: bool) -> TemporalMode {
    if compensate {
        target.clone()
    } else {
        target.with_phase(&chirp_phase(target, coeffs))
    }
}

pub fn run_homodyne(cfg: &ExperimentConfig, compensate: bool) -> Result<HomodyneReport> {
    let h = &cfg.homodyne;
    let params = cfg.cqed_params()?;
    let scheme = cfg.model_scheme()?;
    let coeffs = adiabatic_coeffs(&params, &scheme)?;
    let p1 = match h.p1 {
        Some(p) => p,
        None => emission_efficiency(&params, &scheme)?.value,
    };

    let [a, b] = h.window;
    let dt = (b.0 - a.0) / h.n_bins as f64;
    let grid = Grid::new(a.0 + 0.5 * dt, dt, h.n_bins)?;
    let shape = cfg.shape.mode()?;
    let target = shape.resample(grid.t0, grid.dt, grid.n_bins)?;
    let injected = predicted_mode(&target, &coeffs, compensate);

    let records = synth_records(&injected, &grid, &SynthOptions { p1, trials: h.trials, seed: h.seed, generator: Generator::Gaussian })?;
    let corr = autocorrelation(&records, false)?;
    let vacuum = match h.vacuum_reference {
        VacuumReference::Exact => Correlation::vacuum(grid),
        VacuumReference::Measured => {
            let opts = SynthOptions { p1: 0.0, trials: h.trials, seed: h.seed ^ VACUUM_STREAM, generator: Generator::Gaussian };
            autocorrelation(&synth_records(&injected, &grid, &opts)?, false)?
        }
    };
    let decomposition = decompose(&corr, &vacuum)?;
    let opts = ReconstructOptions { threshold: Threshold::NoiseEdge { sigma: h.threshold_sigma }, ..ReconstructOptions::default() };
    let margin = opts.threshold.margin(grid.n_bins, Some(h.trials));

    let (status, reconstruction) = match reconstruct_mode(&decomposition, &opts) {
        Ok(r) => ("ok", Some(r)),
        Err(HomodyneError::NoSignal) => ("no_signal", None),
        Err(HomodyneError::Multimode { .. }) => ("multimode", None),
        Err(e) => return Err(e.into()),
    };

    let mut summary = HomodyneSummary {
        compensated: compensate,
        delta_mhz: scheme.delta,
        p1,
        trials: h.trials,
        n_bins: h.n_bins,
        seed: h.seed,
        chirp_coefficient: coeffs.chirp_coefficient(),
        eigenvalues: decomposition.eigenvalues.iter().take(6).copied().collect(),
        threshold_margin: margin,
        status,
        significant: reconstruction.as_ref().map_or(0, |r| r.significant),
        photon_numbers: reconstruction.as_ref().map(|r| r.photon_numbers),
        fidelity_injected: None,
        fidelity_target: None,
        fidelity_restored: None,
        photon_stats: None,
    };
    if let Some(rec) = &reconstruction {
        let branches = rec.branches();
        summary.fidelity_injected = Some(best(&injected, &branches)?);
        summary.fidelity_target = Some(best(&target, &branches)?);
        if !compensate {
            let undo: Vec<f64> = chirp_phase(&target, &coeffs).iter().map(|p| -p).collect();
            summary.fidelity_restored = Some(best(&target, &branches.map(|m| m.with_phase(&undo)))?);
        }
        if h.photon_stats {
            let opts = SynthOptions { p1, trials: h.stats_trials, seed: h.seed ^ STATS_STREAM, generator: Generator::FockMixture };
            let mixture = synth_records(&injected, &grid, &opts)?;
            summary.photon_stats = Some(photon_stats(&mixture, rec, &FitOptions::default())?);
        }
    }
    Ok(HomodyneReport { summary, injected, target, records, decomposition, reconstruction })
}

pub struct Homodyne;

impl Command for Homodyne {
    fn name(&self) -> &'static str {
        "homodyne"
    }

    fn about(&self) -> &'static str {
        "Synthetic homodyne records, temporal-mode reconstruction and photon statistics"
    }

    fn args(&self) -> Vec<clap::Arg> {
        vec![clap::Arg::new("no-compensation")
            .long("no-compensation")
            .action(clap::ArgAction::SetTrue)
            .help("Inject the chirped mode emitted without phase compensation")]
    }

    fn seeded(&self) -> bool {
        true
    }

    fn run(&self, ctx: &mut Context<'_>) -> Result<()> {
        let compensate = ctx.config.pulse.compensate && !ctx.args.get_flag("no-compensation");
        let r = run_homodyne(ctx.config, compensate)?;
        ctx.out.write("injected_mode.csv", pulse_shaper::io::mode_to_csv(&r.injected))?;
        if let Some(rec) = &r.reconstruction {
            ctx.out.write("reconstructed_mode.csv", reconstruction_csv(rec))?;
        }
        ctx.out.write("decomposition.json", decomposition_json(&r.decomposition, 4)?)?;
        if ctx.config.homodyne.write_records {
            ctx.out.write("records.csv", records_to_csv(&r.records))?;
        }
        ctx.out.write_json("homodyne.json", &r.summary)
    }
}
