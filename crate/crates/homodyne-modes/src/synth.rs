//! Synthetic quadrature records for a vacuum/single-photon mixture in one
//! complex temporal mode.

use nalgebra::DMatrix;
use pulse_shaper::TemporalMode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::records::{Grid, QuadratureRecords};
use crate::{HomodyneError, Result};

/// Below this weight the imaginary quadrature of a mode is treated as empty.
const EMPTY_WEIGHT: f64 = 1e-14;

/// Splits f = u + iv into two orthogonal real quadrature modes.
///
/// With G = dt·[[u·u, u·v], [u·v, v·v]] and principal angle θ,
/// f·e^{−iθ} = √λ₁ f₁ + i√λ₂ f₂ where f₁, f₂ are real and dt-orthonormal and
/// λ₁ + λ₂ = 1 are the eigenvalues of G. A photon with probability p1 puts
/// n_k = p1·λ_k photons into f_k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpan {
    pub grid: Grid,
    /// Global phase θ removed from f.
    pub rotation: f64,
    /// λ₁ ≥ λ₂.
    pub weights: [f64; 2],
    /// Unit vectors in R^n_bins, e_k = f_k·√dt. The second is absent for a
    /// real mode.
    pub axes: [Option<Vec<f64>>; 2],
}

impl ModeSpan {
    pub fn of(mode: &TemporalMode) -> Self {
        let dt = mode.dt();
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for s in mode.samples() {
            a += s.re * s.re;
            b += s.re * s.im;
            c += s.im * s.im;
        }
        let (a, b, c) = (a * dt, b * dt, c * dt);
        let mean = 0.5 * (a + c);
        let radius = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        let weights = [mean + radius, (mean - radius).max(0.0)];
        let theta = 0.5 * (2.0 * b).atan2(a - c);
        let (sin, cos) = theta.sin_cos();
        let axis = |cu: f64, cv: f64, w: f64| {
            (w > EMPTY_WEIGHT).then(|| {
                let scale = (dt / w).sqrt();
                mode.samples().iter().map(|s| (cu * s.re + cv * s.im) * scale).collect()
            })
        };
        let axes = [axis(cos, sin, weights[0]), axis(-sin, cos, weights[1])];
        Self { grid: Grid::of(mode), rotation: theta, weights, axes }
    }

    /// (n₁, n₂) for single-photon probability `p1`.
    pub fn photon_numbers(&self, p1: f64) -> [f64; 2] {
        self.weights.map(|w| p1 * w)
    }

    /// Real, dt-normalized f_k (zeros for an absent axis).
    pub fn function(&self, k: usize) -> Vec<f64> {
        let scale = self.grid.dt.sqrt().recip();
        match &self.axes[k] {
            Some(e) => e.iter().map(|x| x * scale).collect(),
            None => vec![0.0; self.grid.n_bins],
        }
    }

    /// Exact record covariance I + 2n₁e₁e₁ᵀ + 2n₂e₂e₂ᵀ.
    pub fn covariance(&self, p1: f64) -> DMatrix<f64> {
        let n = self.grid.n_bins;
        let mut cov = DMatrix::identity(n, n);
        for (e, nk) in self.axes.iter().zip(self.photon_numbers(p1)) {
            if let Some(e) = e {
                for i in 0..n {
                    for j in 0..n {
                        cov[(i, j)] += 2.0 * nk * e[i] * e[j];
                    }
                }
            }
        }
        cov
    }
}

/// How the photon part of each trial is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// Gaussian records with the exact second moments.
    #[default]
    Gaussian,
    /// Exact vacuum/Fock-1 mixture: with probability p1 the two principal
    /// quadratures follow the single-photon joint density, else vacuum.
    FockMixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthOptions {
    pub p1: f64,
    pub trials: usize,
    pub seed: u64,
    pub generator: Generator,
}

/// Draws records for `mode` resampled onto `grid`. Trial k uses ChaCha stream
/// k of `seed`, so the output does not depend on the worker count.
pub fn synth_records(mode: &TemporalMode, grid: &Grid, opts: &SynthOptions) -> Result<QuadratureRecords> {
    grid.validate()?;
    if !(0.0..=1.0).contains(&opts.p1) {
        return Err(HomodyneError::InvalidInput(format!("p1 = {} outside [0, 1]", opts.p1)));
    }
    if opts.trials == 0 {
        return Err(HomodyneError::InvalidInput("trials must be positive".into()));
    }
    let on_grid;
    let mode = if Grid::of(mode).same_as(grid) {
        mode
    } else {
        on_grid = mode.resample(grid.t0, grid.dt, grid.n_bins)?;
        &on_grid
    };
    let span = ModeSpan::of(mode);
    let n = grid.n_bins;
    let mut data = vec![0.0; n * opts.trials];
    data.par_chunks_mut(n).enumerate().for_each(|(k, row)| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(k as u64);
        match opts.generator {
            Generator::Gaussian => gaussian_trial(&span, opts.p1, &mut rng, row),
            Generator::FockMixture => mixture_trial(&span, opts.p1, &mut rng, row),
        }
    });
    QuadratureRecords::new(*grid, data)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn gaussian_trial(span: &ModeSpan, p1: f64, rng: &mut ChaCha8Rng, row: &mut [f64]) {
    let amps: [f64; 2] = std::array::from_fn(|k| (2.0 * span.weights[k] * p1).sqrt() * normal(rng));
    row.iter_mut().for_each(|x| *x = normal(rng));
    for (e, a) in span.axes.iter().zip(amps) {
        if let Some(e) = e {
            row.iter_mut().zip(e).for_each(|(x, ej)| *x += a * ej);
        }
    }
}

fn mixture_trial(span: &ModeSpan, p1: f64, rng: &mut ChaCha8Rng, row: &mut [f64]) {
    // Fixed draw order so the projections do not depend on the grid.
    let photon = rng.gen::<f64>() < p1;
    let first = rng.gen::<f64>() < span.weights[0];
    let excited = ChiSquared::<f64>::new(3.0).expect("valid").sample(rng).sqrt() * if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let mut y = [normal(rng), normal(rng)];
    if photon {
        y[if first { 0 } else { 1 }] = excited;
    }
    row.iter_mut().for_each(|x| *x = normal(rng));
    for (e, yk) in span.axes.iter().zip(y) {
        if let Some(e) = e {
            let proj: f64 = row.iter().zip(e).map(|(x, ej)| x * ej).sum();
            row.iter_mut().zip(e).for_each(|(x, ej)| *x += (yk - proj) * ej);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn chirped(n: usize) -> TemporalMode {
        let s = (0..n)
            .map(|j| {
                let t = -2.0 + (j as f64 + 0.5) * 4.0 / n as f64;
                Complex64::from_polar(1.0 / (t / 0.5).cosh(), 1.3 * t * t + 0.4 * t)
            })
            .collect();
        TemporalMode::normalized(-2.0 + 2.0 / n as f64, 4.0 / n as f64, s).unwrap()
    }

    #[test]
    fn span_reassembles_the_mode_up_to_global_phase() {
        let m = chirped(40);
        let span = ModeSpan::of(&m);
        assert!((span.weights[0] + span.weights[1] - 1.0).abs() < 1e-12);
        let (f1, f2) = (span.function(0), span.function(1));
        let [l1, l2] = span.weights;
        let rot = Complex64::from_polar(1.0, span.rotation);
        for (j, s) in m.samples().iter().enumerate() {
            let back = Complex64::new(l1.sqrt() * f1[j], l2.sqrt() * f2[j]) * rot;
            assert!((back - s).norm() < 1e-12);
        }
        let dot: f64 = f1.iter().zip(&f2).map(|(a, b)| a * b).sum::<f64>() * m.dt();
        assert!(dot.abs() < 1e-12);
    }

    #[test]
    fn real_mode_has_one_axis() {
        let s = (0..32).map(|j| Complex64::new(-(j as f64 - 15.5).powi(2) / 40.0, 0.0).exp()).collect();
        let span = ModeSpan::of(&TemporalMode::normalized(0.0, 0.1, s).unwrap());
        assert!(span.axes[1].is_none());
        assert!((span.weights[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn records_do_not_depend_on_worker_count() {
        let m = chirped(24);
        let opts = SynthOptions { p1: 0.4, trials: 300, seed: 9, generator: Generator::FockMixture };
        let grid = Grid::of(&m);
        let a = synth_records(&m, &grid, &opts).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| synth_records(&m, &grid, &opts).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn p1_outside_unit_interval_is_rejected() {
        let m = chirped(24);
        let opts = SynthOptions { p1: 1.2, trials: 10, seed: 0, generator: Generator::Gaussian };
        assert!(matches!(synth_records(&m, &Grid::of(&m), &opts), Err(HomodyneError::InvalidInput(_))));
    }
}
