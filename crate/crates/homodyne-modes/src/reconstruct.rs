use num_complex::Complex64;
use pulse_shaper::TemporalMode;
use serde::{Deserialize, Serialize};

use crate::decompose::ModeDecomposition;
use crate::{HomodyneError, Result};

/// When an eigenvalue counts as "above one".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Threshold {
    /// κ > 1 + σ/√trials.
    StandardErrors { sigma: f64 },
    /// κ above the upper edge of the sample-covariance spectrum of pure
    /// vacuum, (1 + √c)² with c = n_bins/trials, plus σ/√trials.
    NoiseEdge { sigma: f64 },
    /// κ > 1 + margin.
    Fixed { margin: f64 },
}

impl Default for Threshold {
    fn default() -> Self {
        Self::NoiseEdge { sigma: 5.0 }
    }
}

impl Threshold {
    /// Margin above 1. Exact decompositions (no trial count) use 1e-9.
    pub fn margin(&self, n_bins: usize, trials: Option<usize>) -> f64 {
        match (*self, trials) {
            (Self::Fixed { margin }, _) => margin,
            (_, None) => 1e-9,
            (Self::StandardErrors { sigma }, Some(t)) => sigma / (t as f64).sqrt(),
            (Self::NoiseEdge { sigma }, Some(t)) => {
                let c = n_bins as f64 / t as f64;
                2.0 * c.sqrt() + c + sigma / (t as f64).sqrt()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructOptions {
    pub threshold: Threshold,
    /// φ is reported only where |f| exceeds this fraction of max |f|.
    pub phase_floor: f64,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self { threshold: Threshold::default(), phase_floor: 0.05 }
    }
}

/// f = (√n₁ f₁ + i√n₂ f₂)/√(n₁+n₂). Which eigenfunction carries the
/// imaginary part is not observable, so f and f* are equally valid; the
/// stored mode is one branch and [`ReconstructedMode::conjugate`] the other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructedMode {
    pub mode: TemporalMode,
    /// arg f where |f| is above the floor, `None` elsewhere.
    pub phase: Vec<Option<f64>>,
    pub photon_numbers: (f64, f64),
    /// Number of eigenvalues above threshold (1 or 2).
    pub significant: usize,
    pub margin: f64,
}

impl ReconstructedMode {
    /// The other phase branch, f*.
    pub fn conjugate(&self) -> Self {
        let samples = self.mode.samples().iter().map(|s| s.conj()).collect();
        Self {
            mode: TemporalMode::new(self.mode.t0(), self.mode.dt(), samples).expect("conjugation keeps the norm"),
            phase: self.phase.iter().map(|p| p.map(|x| -x)).collect(),
            ..self.clone()
        }
    }

    pub fn total_photons(&self) -> f64 {
        self.photon_numbers.0 + self.photon_numbers.1
    }

    /// Both branches, f first.
    pub fn branches(&self) -> [TemporalMode; 2] {
        [self.mode.clone(), self.conjugate().mode]
    }
}

pub fn reconstruct_mode(dec: &ModeDecomposition, opts: &ReconstructOptions) -> Result<ReconstructedMode> {
    let margin = opts.threshold.margin(dec.grid.n_bins, dec.trials);
    let significant = dec.eigenvalues.iter().take_while(|&&k| k > 1.0 + margin).count();
    match significant {
        0 => return Err(HomodyneError::NoSignal),
        1 | 2 => {}
        count => {
            return Err(HomodyneError::Multimode { count, eigenvalues: dec.eigenvalues[..count].to_vec() });
        }
    }
    let n = dec.photon_numbers();
    let n1 = n[0];
    let n2 = if significant == 2 { n[1] } else { 0.0 };
    let (a, b) = (n1.sqrt(), n2.sqrt());
    let f1 = &dec.eigenfunctions[0];
    let samples: Vec<Complex64> = if significant == 2 {
        f1.iter().zip(&dec.eigenfunctions[1]).map(|(x, y)| Complex64::new(a * x, b * y)).collect()
    } else {
        f1.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    };
    let mode = TemporalMode::normalized(dec.grid.t0, dec.grid.dt, samples)?;

    let peak = mode.samples().iter().map(|s| s.norm()).fold(0.0, f64::max);
    let floor = opts.phase_floor * peak;
    let phase = mode
        .samples()
        .iter()
        .map(|s| (s.norm() > floor).then(|| if significant == 2 { s.im.atan2(s.re) } else { 0.0 }))
        .collect();
    Ok(ReconstructedMode { mode, phase, photon_numbers: (n1, n2), significant, margin })
}
