use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Result, ShaperError, MIN_SAMPLES, NORM_TOLERANCE};

/// A normalized single-photon amplitude e(t_j) on the grid t_j = t0 + j·dt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalMode {
    t0: f64,
    dt: f64,
    samples: Vec<Complex64>,
}

fn check_grid(dt: f64, n: usize) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(ShaperError::InvalidSpec(format!("grid step {dt} must be positive")));
    }
    if n < MIN_SAMPLES {
        return Err(ShaperError::TooFewSamples { got: n, min: MIN_SAMPLES });
    }
    Ok(())
}

impl TemporalMode {
    /// Wraps samples that are already normalized.
    pub fn new(t0: f64, dt: f64, samples: Vec<Complex64>) -> Result<Self> {
        check_grid(dt, samples.len())?;
        let mode = Self { t0, dt, samples };
        let norm = mode.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(ShaperError::NotNormalized(norm));
        }
        Ok(mode)
    }

    /// Scales arbitrary samples to unit norm.
    pub fn normalized(t0: f64, dt: f64, mut samples: Vec<Complex64>) -> Result<Self> {
        check_grid(dt, samples.len())?;
        let norm = samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * dt;
        if !(norm.is_finite() && norm > 0.0) {
            return Err(ShaperError::InvalidSpec("mode has no energy".into()));
        }
        let scale = norm.sqrt().recip();
        samples.iter_mut().for_each(|s| *s *= scale);
        Ok(Self { t0, dt, samples })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|j| self.time(j))
    }

    /// Σ|e_j|²·dt.
    pub fn norm(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.dt
    }

    /// Σ f_j* g_j dt, requiring identical grids.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        self.check_same_grid(other)?;
        Ok(self.samples.iter().zip(&other.samples).map(|(f, g)| f.conj() * g).sum::<Complex64>() * self.dt)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.check_same_grid(other).is_ok()
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        let tol = 1e-9 * self.dt;
        if self.len() != other.len() || (self.dt - other.dt).abs() > tol || (self.t0 - other.t0).abs() > tol {
            return Err(ShaperError::GridMismatch(format!(
                "(t0 {}, dt {}, n {}) vs (t0 {}, dt {}, n {})",
                self.t0,
                self.dt,
                self.len(),
                other.t0,
                other.dt,
                other.len()
            )));
        }
        Ok(())
    }

    /// Linear interpolation onto another grid, zero outside the original
    /// support, renormalized.
    pub fn resample(&self, t0: f64, dt: f64, n: usize) -> Result<Self> {
        let samples = (0..n).map(|j| self.interpolate(t0 + j as f64 * dt)).collect();
        Self::normalized(t0, dt, samples)
    }

    /// Resamples onto the grid of `like`.
    pub fn resample_like(&self, like: &Self) -> Result<Self> {
        self.resample(like.t0, like.dt, like.len())
    }

    /// Amplitude at an arbitrary time by linear interpolation.
    pub fn interpolate(&self, t: f64) -> Complex64 {
        let last = (self.len() - 1) as f64;
        let x = (t - self.t0) / self.dt;
        if !(-1e-9..=last + 1e-9).contains(&x) {
            return Complex64::new(0.0, 0.0);
        }
        let x = x.clamp(0.0, last);
        let i = (x.floor() as usize).min(self.len() - 2);
        let w = x - i as f64;
        self.samples[i] * (1.0 - w) + self.samples[i + 1] * w
    }

    /// Multiplies each sample by exp(i·phase_j) and returns the new mode.
    pub fn with_phase(&self, phase: &[f64]) -> Self {
        assert_eq!(phase.len(), self.len(), "one phase per sample");
        let samples = self.samples.iter().zip(phase).map(|(s, p)| s * Complex64::from_polar(1.0, *p)).collect();
        Self { t0: self.t0, dt: self.dt, samples }
    }

    /// Appends `n` zero samples after the last one.
    pub fn zero_padded(&self, n: usize) -> Self {
        let mut samples = self.samples.clone();
        samples.resize(self.len() + n, Complex64::new(0.0, 0.0));
        Self { t0: self.t0, dt: self.dt, samples }
    }
}

/// |Σ f_j* g_j dt|². Both modes must live on the same grid; use
/// [`TemporalMode::resample_like`] otherwise.
pub fn mode_fidelity(f: &TemporalMode, g: &TemporalMode) -> Result<f64> {
    Ok(f.overlap(g)?.norm_sqr().min(1.0))
}

/// Storage efficiency of `input` by a control pulse designed for `accepted`.
pub fn selection_efficiency(input: &TemporalMode, accepted: &TemporalMode, eta0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta0) {
        return Err(ShaperError::InvalidSpec(format!("eta0 = {eta0} outside [0, 1]")));
    }
    Ok(eta0 * mode_fidelity(input, accepted)?)
}

/// e(t) → e*(−t). The grid maps onto its mirror image.
pub fn time_reverse(mode: &TemporalMode) -> TemporalMode {
    let n = mode.len();
    TemporalMode {
        t0: -mode.time(n - 1),
        dt: mode.dt,
        samples: mode.samples.iter().rev().map(|s| s.conj()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize) -> TemporalMode {
        let s = (0..n).map(|j| Complex64::new(j as f64, 0.5 * j as f64)).collect();
        TemporalMode::normalized(0.0, 0.1, s).unwrap()
    }

    #[test]
    fn new_rejects_unnormalized_samples() {
        let err = TemporalMode::new(0.0, 1.0, vec![Complex64::new(1.0, 0.0); 16]).unwrap_err();
        assert!(matches!(err, ShaperError::NotNormalized(n) if (n - 16.0).abs() < 1e-12));
    }

    #[test]
    fn short_grids_are_rejected() {
        let err = TemporalMode::normalized(0.0, 1.0, vec![Complex64::new(1.0, 0.0); 15]).unwrap_err();
        assert!(matches!(err, ShaperError::TooFewSamples { got: 15, .. }));
    }

    #[test]
    fn self_fidelity_is_one() {
        let m = ramp(40);
        assert!((mode_fidelity(&m, &m).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_grids_error() {
        let err = mode_fidelity(&ramp(40), &ramp(41)).unwrap_err();
        assert!(matches!(err, ShaperError::GridMismatch(_)));
    }

    #[test]
    fn time_reverse_mirrors_grid() {
        let m = ramp(20);
        let r = time_reverse(&m);
        assert_eq!(r.t0(), -m.time(19));
        assert_eq!(r.samples()[0], m.samples()[19].conj());
        assert_eq!(time_reverse(&r), m);
    }

    #[test]
    fn resample_onto_own_grid_is_identity() {
        let m = ramp(30);
        let r = m.resample_like(&m).unwrap();
        for (a, b) in m.samples().iter().zip(r.samples()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
