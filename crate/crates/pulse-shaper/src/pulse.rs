//! Control pulses that release (emission) or capture (storage) a photon in a
//! prescribed temporal mode.
//!
//! Emission: Ω(t) = e(t) / √(2 Re K · R(t)) · exp(−i·c·ln R(t)), where
//! R(t) = ∫ₜ^∞ |e|² is the energy still to be emitted and c = Im K / (2 Re K).
//! Storage is the time-reversed process and uses the energy already absorbed,
//! Q(t) = ∫^t |e|², with the opposite phase sign.
//!
//! On the grid R_j = Σ_{k>j} |e_k|² dt and Q_j = Σ_{k<j} |e_k|² dt. Q is
//! summed in the mirror order of R, so storage of a mode is bit-identical to
//! the conjugated, reversed emission of its time reverse.

use cqed_core::units::{angular, linear};
use cqed_core::AdiabaticCoeffs;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::mode::TemporalMode;
use crate::{Result, ShaperError, NORM_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseOptions {
    /// Include the light-shift phase term.
    pub compensate_phase: bool,
    /// Largest allowed |Ω|, linear MHz.
    pub omega_max: f64,
    /// The drive is switched off once the remaining (emission) or absorbed
    /// (storage) energy fraction is below this value.
    pub tail_epsilon: f64,
}

impl Default for PulseOptions {
    fn default() -> Self {
        Self { compensate_phase: true, omega_max: 50.0, tail_epsilon: 1e-4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Emission,
    Storage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlPulse {
    pub direction: Direction,
    pub t0: f64,
    pub dt: f64,
    /// Rabi frequency, linear MHz.
    pub omega: Vec<Complex64>,
    /// h_j = ∫_{t0}^{t_j} |Ω|² dt′ in rad²/µs, trapezoidal.
    pub h: Vec<f64>,
    pub compensated: bool,
    /// Samples where the drive is cut because the energy fraction fell below
    /// `tail_epsilon`: from this index to the end for emission, up to and
    /// including it for storage.
    pub clamp_onset: Option<usize>,
    /// Number of samples limited to `omega_max`.
    pub saturated: usize,
}

impl ControlPulse {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    /// Ω in rad/µs.
    pub fn omega_angular(&self, j: usize) -> Complex64 {
        self.omega[j] * angular(1.0)
    }

    pub fn max_abs_omega(&self) -> f64 {
        self.omega.iter().map(|w| w.norm()).fold(0.0, f64::max)
    }

    /// The same drive with Ω ≡ 0.
    pub fn zeroed(&self) -> Self {
        Self {
            omega: vec![Complex64::new(0.0, 0.0); self.len()],
            h: vec![0.0; self.len()],
            clamp_onset: None,
            saturated: 0,
            ..self.clone()
        }
    }
}

fn check_inputs(mode: &TemporalMode, coeffs: &AdiabaticCoeffs, opts: &PulseOptions) -> Result<()> {
    if coeffs.k.re <= 0.0 || !coeffs.k.re.is_finite() {
        return Err(ShaperError::NonPositiveReK(coeffs.k.re));
    }
    let norm = mode.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(ShaperError::NotNormalized(norm));
    }
    if !(opts.omega_max > 0.0) {
        return Err(ShaperError::InvalidSpec(format!("omega_max = {} must be positive", opts.omega_max)));
    }
    if !(opts.tail_epsilon >= 0.0) {
        return Err(ShaperError::InvalidSpec(format!("tail_epsilon = {} must be non-negative", opts.tail_epsilon)));
    }
    Ok(())
}

/// Ω for one sample in rad/µs given the relevant energy fraction. `sign` is
/// −1 for emission and +1 for storage.
fn sample(e: Complex64, energy: f64, k: Complex64, sign: f64, opts: &PulseOptions) -> (Complex64, bool) {
    let mut w = e * (2.0 * k.re * energy).sqrt().recip();
    if opts.compensate_phase {
        w *= Complex64::from_polar(1.0, sign * k.im / (2.0 * k.re) * energy.ln());
    }
    let max = angular(opts.omega_max);
    let mag = w.norm();
    if mag > max {
        (w * (max / mag), true)
    } else {
        (w, false)
    }
}

/// Energy fractions R_j = Σ_{k>j} |e_k|² dt.
pub(crate) fn remaining_energy(mode: &TemporalMode) -> Vec<f64> {
    let e = mode.samples();
    let mut r = vec![0.0; e.len()];
    for j in (0..e.len() - 1).rev() {
        r[j] = r[j + 1] + e[j + 1].norm_sqr() * mode.dt();
    }
    r
}

/// Energy fractions Q_j = Σ_{k<j} |e_k|² dt.
fn absorbed_energy(mode: &TemporalMode) -> Vec<f64> {
    let e = mode.samples();
    let mut q = vec![0.0; e.len()];
    for j in 1..e.len() {
        q[j] = q[j - 1] + e[j - 1].norm_sqr() * mode.dt();
    }
    q
}

fn trapezoid_h(omega: &[Complex64], dt: f64) -> Vec<f64> {
    let w2: Vec<f64> = omega.iter().map(|w| w.norm_sqr()).collect();
    let mut h = vec![0.0; omega.len()];
    for j in 1..omega.len() {
        h[j] = h[j - 1] + 0.5 * dt * (w2[j - 1] + w2[j]);
    }
    h
}

fn assemble(mode: &TemporalMode, direction: Direction, omega_rad: Vec<Complex64>, clamp_onset: Option<usize>, saturated: usize, compensated: bool) -> ControlPulse {
    let h = trapezoid_h(&omega_rad, mode.dt());
    ControlPulse {
        direction,
        t0: mode.t0(),
        dt: mode.dt(),
        omega: omega_rad.into_iter().map(|w| w * linear(1.0)).collect(),
        h,
        compensated,
        clamp_onset,
        saturated,
    }
}

pub fn emission_control(mode: &TemporalMode, coeffs: &AdiabaticCoeffs, opts: &PulseOptions) -> Result<ControlPulse> {
    check_inputs(mode, coeffs, opts)?;
    let r = remaining_energy(mode);
    let mut omega = vec![Complex64::new(0.0, 0.0); mode.len()];
    let mut onset = None;
    let mut saturated = 0;
    for (j, (&e, &rj)) in mode.samples().iter().zip(&r).enumerate() {
        if rj < opts.tail_epsilon || rj <= 0.0 {
            onset = Some(j);
            break;
        }
        let (w, sat) = sample(e, rj, coeffs.k, -1.0, opts);
        omega[j] = w;
        saturated += sat as usize;
    }
    Ok(assemble(mode, Direction::Emission, omega, onset, saturated, opts.compensate_phase))
}

pub fn storage_control(mode: &TemporalMode, coeffs: &AdiabaticCoeffs, opts: &PulseOptions) -> Result<ControlPulse> {
    check_inputs(mode, coeffs, opts)?;
    let q = absorbed_energy(mode);
    let mut omega = vec![Complex64::new(0.0, 0.0); mode.len()];
    let mut onset = None;
    let mut saturated = 0;
    for j in (0..mode.len()).rev() {
        if q[j] < opts.tail_epsilon || q[j] <= 0.0 {
            onset = Some(j);
            break;
        }
        let (w, sat) = sample(mode.samples()[j], q[j], coeffs.k, 1.0, opts);
        omega[j] = w;
        saturated += sat as usize;
    }
    Ok(assemble(mode, Direction::Storage, omega, onset, saturated, opts.compensate_phase))
}

/// Phase θ_j = c·ln R_j that an uncompensated emission imprints on the
/// photon, e_out ∝ e·exp(iθ). Zero where R_j = 0.
pub fn chirp_phase(mode: &TemporalMode, coeffs: &AdiabaticCoeffs) -> Vec<f64> {
    let c = coeffs.chirp_coefficient();
    remaining_energy(mode).into_iter().map(|r| if r > 0.0 { c * r.ln() } else { 0.0 }).collect()
}

/// Removes the light-shift chirp from a mode emitted without compensation.
/// `target` supplies R(t); `emitted` must share its grid.
pub fn compensate_chirp(emitted: &TemporalMode, target: &TemporalMode, coeffs: &AdiabaticCoeffs) -> Result<TemporalMode> {
    if !emitted.same_grid(target) {
        return Err(ShaperError::GridMismatch("emitted mode and target".into()));
    }
    let phase: Vec<f64> = chirp_phase(target, coeffs).into_iter().map(|p| -p).collect();
    Ok(emitted.with_phase(&phase))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::{make_shape, ShapeSpec};
    use cqed_core::{adiabatic_coeffs, CqedParams, LevelScheme};

    fn coeffs() -> AdiabaticCoeffs {
        adiabatic_coeffs(&CqedParams::rb87_setup(), &LevelScheme::ideal_lambda(-20.0)).unwrap()
    }

    #[test]
    fn h_is_non_decreasing_and_omega_bounded() {
        let m = make_shape(&ShapeSpec::sech(0.5, 10.0, 2000)).unwrap();
        let opts = PulseOptions::default();
        let p = emission_control(&m, &coeffs(), &opts).unwrap();
        assert!(p.h.windows(2).all(|w| w[1] >= w[0]));
        assert!(p.max_abs_omega() <= opts.omega_max * (1.0 + 1e-12));
        assert!(p.clamp_onset.is_some());
    }

    #[test]
    fn emission_pulse_is_zero_after_onset() {
        let m = make_shape(&ShapeSpec::sech(0.5, 10.0, 2000)).unwrap();
        let p = emission_control(&m, &coeffs(), &PulseOptions::default()).unwrap();
        let onset = p.clamp_onset.unwrap();
        assert!(p.omega[onset..].iter().all(|w| w.norm() == 0.0));
        assert!(p.omega[onset - 1].norm() > 0.0);
    }

    #[test]
    fn non_positive_re_k_is_rejected() {
        let m = make_shape(&ShapeSpec::square(1.0, 32)).unwrap();
        let mut c = coeffs();
        c.k.re = 0.0;
        assert!(matches!(emission_control(&m, &c, &PulseOptions::default()), Err(ShaperError::NonPositiveReK(_))));
    }
}
