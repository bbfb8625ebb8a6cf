//! Photon-number distribution from the quadratures of one temporal mode.
//!
//! The mode f is split into principal quadrature modes with weights w₁, w₂
//! (see [`ModeSpan`]). Each trial gives the pair (y₁, y₂) of projections
//! onto them. For the Fock states of f, the joint densities divided by
//! N(y₁)N(y₂) are
//!
//! ```text
//! |0⟩: 1
//! |1⟩: w₁y₁² + w₂y₂²
//! |2⟩: (w₁(y₁²−1) − w₂(y₂²−1))²/2 + 2w₁w₂y₁²y₂²
//! ```
//!
//! The weights p₀, p₁, p₂ of a diagonal mixture are fitted by
//! expectation-maximization of the likelihood.

use serde::{Deserialize, Serialize};

use crate::records::{Grid, QuadratureRecords, MIN_TRIALS};
use crate::reconstruct::ReconstructedMode;
use crate::synth::ModeSpan;
use crate::{HomodyneError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Stop when no probability moves by more than this in one iteration.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_iterations: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonStats {
    /// p₀, p₁, p₂.
    pub probabilities: [f64; 3],
    /// Standard errors from the observed information.
    pub uncertainties: [f64; 3],
    pub weights: [f64; 2],
    pub log_likelihood: f64,
    pub iterations: usize,
    pub trials: usize,
}

impl PhotonStats {
    pub fn p0(&self) -> f64 {
        self.probabilities[0]
    }

    pub fn p1(&self) -> f64 {
        self.probabilities[1]
    }

    pub fn p2(&self) -> f64 {
        self.probabilities[2]
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.probabilities[1] + 2.0 * self.probabilities[2]
    }
}

/// Single-photon probability at the source, p₁/(detection · preparation).
pub fn source_brightness(p1: f64, detection: f64, preparation: f64) -> Result<f64> {
    for (name, v) in [("detection", detection), ("preparation", preparation)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(HomodyneError::OutOfRange { stage: name.into(), value: v });
        }
    }
    Ok(p1 / (detection * preparation))
}

pub fn photon_stats(records: &QuadratureRecords, mode: &ReconstructedMode, opts: &FitOptions) -> Result<PhotonStats> {
    photon_stats_in_mode(records, &mode.mode, opts)
}

/// As [`photon_stats`] for any mode on the records' grid.
pub fn photon_stats_in_mode(records: &QuadratureRecords, mode: &pulse_shaper::TemporalMode, opts: &FitOptions) -> Result<PhotonStats> {
    records.require_trials(MIN_TRIALS)?;
    if !Grid::of(mode).same_as(&records.grid()) {
        return Err(HomodyneError::InvalidInput("mode and records live on different grids".into()));
    }
    let span = ModeSpan::of(mode);
    let [w1, w2] = span.weights;
    let project = |row: &[f64], k: usize| -> f64 { span.axes[k].as_ref().map_or(0.0, |e| row.iter().zip(e).map(|(x, ej)| x * ej).sum()) };

    let likelihoods: Vec<[f64; 3]> = records
        .iter()
        .map(|row| {
            let (a, b) = (project(row, 0).powi(2), project(row, 1).powi(2));
            let two = 0.5 * (w1 * (a - 1.0) - w2 * (b - 1.0)).powi(2) + 2.0 * w1 * w2 * a * b;
            [1.0, w1 * a + w2 * b, two]
        })
        .collect();

    let mut p = [0.6, 0.3, 0.1];
    let mut iterations = 0;
    loop {
        if iterations == opts.max_iterations {
            return Err(HomodyneError::FitDidNotConverge { iterations });
        }
        iterations += 1;
        let mut next = [0.0; 3];
        for l in &likelihoods {
            let mix = p[0] * l[0] + p[1] * l[1] + p[2] * l[2];
            for k in 0..3 {
                next[k] += p[k] * l[k] / mix;
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let change = (0..3).map(|k| (next[k] - p[k]).abs()).fold(0.0, f64::max);
        p = next;
        if change < opts.tolerance {
            break;
        }
    }

    // Observed information for the free parameters (p₁, p₂).
    let mut info = [[0.0; 2]; 2];
    let mut log_likelihood = 0.0;
    for l in &likelihoods {
        let mix = p[0] * l[0] + p[1] * l[1] + p[2] * l[2];
        log_likelihood += mix.ln();
        let s = [(l[1] - l[0]) / mix, (l[2] - l[0]) / mix];
        for i in 0..2 {
            for j in 0..2 {
                info[i][j] += s[i] * s[j];
            }
        }
    }
    let det = info[0][0] * info[1][1] - info[0][1] * info[1][0];
    let uncertainties = if det > 0.0 {
        let (v11, v22, v12) = (info[1][1] / det, info[0][0] / det, -info[0][1] / det);
        [(v11 + v22 + 2.0 * v12).max(0.0).sqrt(), v11.max(0.0).sqrt(), v22.max(0.0).sqrt()]
    } else {
        [f64::NAN; 3]
    };
    Ok(PhotonStats { probabilities: p, uncertainties, weights: span.weights, log_likelihood, iterations, trials: records.trials() })
}
