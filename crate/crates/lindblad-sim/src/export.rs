//! Per-time CSV and JSON summary of a simulation.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::evolve::SimResult;
use crate::experiment::EmissionReport;
use crate::Result;

pub fn result_to_csv(result: &SimResult) -> String {
    let mut out = String::from("t");
    for l in &result.atomic_labels {
        let _ = write!(out, ",pop[{l}]");
    }
    out.push_str(",n_sigma_plus,n_sigma_minus,flux_sigma_plus,flux_sigma_minus,out_coupled_sigma_plus,out_coupled_sigma_minus,lost_sigma_plus,lost_sigma_minus,out_coupled,lost,coherent_re,coherent_im,trace\n");
    for j in 0..result.len() {
        let _ = write!(out, "{}", result.times[j]);
        for p in &result.atomic_populations[j] {
            let _ = write!(out, ",{p}");
        }
        let pair = |v: &[Vec<f64>; 2]| (v[0][j], v[1][j]);
        let (n0, n1) = pair(&result.photon_number);
        let (f0, f1) = pair(&result.flux_out);
        let (o0, o1) = pair(&result.out_coupled);
        let (l0, l1) = pair(&result.lost);
        let c = result.coherent_amplitude[j];
        let _ = writeln!(out, ",{n0},{n1},{f0},{f1},{o0},{o1},{l0},{l1},{},{},{},{},{}", o0 + o1, l0 + l1, c.re, c.im, result.trace[j]);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub delta: f64,
    pub efficiency: f64,
    pub wrong_polarization: f64,
    pub lost: f64,
    pub coherent_efficiency: f64,
    pub incoherent_fraction: f64,
    pub analytic_efficiency: f64,
    pub fidelity: f64,
    pub intensity_fidelity: f64,
    pub trace_drift: f64,
    pub clamp_onset: Option<usize>,
    pub saturated_samples: usize,
}

impl From<&EmissionReport> for Summary {
    fn from(r: &EmissionReport) -> Self {
        Self {
            delta: r.delta,
            efficiency: r.efficiency,
            wrong_polarization: r.wrong_polarization,
            lost: r.lost,
            coherent_efficiency: r.coherent_efficiency,
            incoherent_fraction: r.incoherent_fraction,
            analytic_efficiency: r.analytic_efficiency,
            fidelity: r.fidelity,
            intensity_fidelity: r.intensity_fidelity,
            trace_drift: r.max_trace_drift,
            clamp_onset: r.pulse.clamp_onset,
            saturated_samples: r.pulse.saturated,
        }
    }
}

pub fn summary_json(report: &EmissionReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(&Summary::from(report))?)
}

pub fn write_report(dir: impl AsRef<Path>, stem: &str, report: &EmissionReport) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::write(dir.join(format!("{stem}.csv")), result_to_csv(&report.result))?;
    std::fs::write(dir.join(format!("{stem}.json")), summary_json(report)?)?;
    Ok(())
}
