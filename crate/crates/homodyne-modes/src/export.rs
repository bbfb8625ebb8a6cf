use std::fmt::Write as _;

use serde::Serialize;

use crate::decompose::ModeDecomposition;
use crate::reconstruct::ReconstructedMode;
use crate::Result;

#[derive(Serialize)]
struct DecompositionJson<'a> {
    t0: f64,
    dt: f64,
    n_bins: usize,
    trials: Option<usize>,
    eigenvalues: &'a [f64],
    photon_numbers: Vec<f64>,
    /// Leading eigenfunctions only.
    eigenfunctions: &'a [Vec<f64>],
}

/// Spectrum plus the first `keep` eigenfunctions.
pub fn decomposition_json(dec: &ModeDecomposition, keep: usize) -> Result<String> {
    let keep = keep.min(dec.eigenfunctions.len());
    Ok(serde_json::to_string_pretty(&DecompositionJson {
        t0: dec.grid.t0,
        dt: dec.grid.dt,
        n_bins: dec.grid.n_bins,
        trials: dec.trials,
        eigenvalues: &dec.eigenvalues,
        photon_numbers: dec.photon_numbers(),
        eigenfunctions: &dec.eigenfunctions[..keep],
    })?)
}

#[derive(Serialize)]
struct ReconstructionJson<'a> {
    t0: f64,
    dt: f64,
    n1: f64,
    n2: f64,
    significant: usize,
    threshold_margin: f64,
    re: Vec<f64>,
    im: Vec<f64>,
    phase: &'a [Option<f64>],
}

pub fn reconstruction_json(rec: &ReconstructedMode) -> Result<String> {
    let s = rec.mode.samples();
    Ok(serde_json::to_string_pretty(&ReconstructionJson {
        t0: rec.mode.t0(),
        dt: rec.mode.dt(),
        n1: rec.photon_numbers.0,
        n2: rec.photon_numbers.1,
        significant: rec.significant,
        threshold_margin: rec.margin,
        re: s.iter().map(|c| c.re).collect(),
        im: s.iter().map(|c| c.im).collect(),
        phase: &rec.phase,
    })?)
}

/// Columns t, re, im, abs, phase (empty where undefined).
pub fn reconstruction_csv(rec: &ReconstructedMode) -> String {
    let mut out = String::from("t,re,im,abs,phase\n");
    for (j, (s, p)) in rec.mode.samples().iter().zip(&rec.phase).enumerate() {
        let _ = write!(out, "{},{},{},{},", rec.mode.time(j), s.re, s.im, s.norm());
        if let Some(p) = p {
            let _ = write!(out, "{p}");
        }
        out.push('\n');
    }
    out
}
