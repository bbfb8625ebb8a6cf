//! Target photon shapes. Analytic families implement [`ShapeFamily`] and are
//! looked up by name in a [`ShapeRegistry`]; arbitrary sampled shapes go
//! through [`FamilySpec::Custom`].
//!
//! Samples sit at cell midpoints, t_j = t_min + (j + ½)·dt with
//! dt = (t_max − t_min)/n, so a window symmetric about zero gives a grid that
//! is its own mirror image and a symmetric shape gives mirrored samples.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::mode::TemporalMode;
use crate::{Result, ShaperError};

/// Fraction of analytic pulse energy a window must contain.
pub const MIN_CAPTURED_ENERGY: f64 = 0.999;

pub trait ShapeFamily: Send + Sync {
    fn name(&self) -> &str;
    /// Unnormalized amplitude at time t (µs).
    fn amplitude(&self, t: f64) -> f64;
    /// Fraction of the total energy ∫|e|² lying in [t_min, t_max].
    fn energy_fraction(&self, t_min: f64, t_max: f64) -> f64;
}

/// e(t) ∝ sech(t/T), centred on t = 0.
struct Sech {
    t: f64,
}

impl ShapeFamily for Sech {
    fn name(&self) -> &str {
        "sech"
    }

    fn amplitude(&self, t: f64) -> f64 {
        1.0 / (t / self.t).cosh()
    }

    fn energy_fraction(&self, t_min: f64, t_max: f64) -> f64 {
        0.5 * ((t_max / self.t).tanh() - (t_min / self.t).tanh())
    }
}

/// e(t) ∝ exp(−t²/4σ²), so that |e|² has standard deviation σ.
struct Gaussian {
    sigma: f64,
}

impl ShapeFamily for Gaussian {
    fn name(&self) -> &str {
        "gaussian"
    }

    fn amplitude(&self, t: f64) -> f64 {
        (-t * t / (4.0 * self.sigma * self.sigma)).exp()
    }

    fn energy_fraction(&self, t_min: f64, t_max: f64) -> f64 {
        let s = std::f64::consts::SQRT_2 * self.sigma;
        0.5 * (libm::erf(t_max / s) - libm::erf(t_min / s))
    }
}

/// Constant amplitude on [0, T).
struct Square {
    t: f64,
}

impl ShapeFamily for Square {
    fn name(&self) -> &str {
        "square"
    }

    fn amplitude(&self, t: f64) -> f64 {
        if (0.0..self.t).contains(&t) {
            1.0
        } else {
            0.0
        }
    }

    fn energy_fraction(&self, t_min: f64, t_max: f64) -> f64 {
        (t_max.min(self.t) - t_min.max(0.0)).max(0.0) / self.t
    }
}

type Builder = Arc<dyn Fn(f64) -> Box<dyn ShapeFamily> + Send + Sync>;

/// Named constructors for analytic shape families, each taking its
/// characteristic time in µs.
#[derive(Clone)]
pub struct ShapeRegistry {
    builders: BTreeMap<String, Builder>,
}

impl ShapeRegistry {
    pub fn empty() -> Self {
        Self { builders: BTreeMap::new() }
    }

    /// Registry holding `sech`, `gaussian` and `square`.
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register("sech", |t| Box::new(Sech { t }));
        r.register("gaussian", |sigma| Box::new(Gaussian { sigma }));
        r.register("square", |t| Box::new(Square { t }));
        r
    }

    /// Adds or replaces a family.
    pub fn register<F>(&mut self, name: &str, builder: F)
    where
        F: Fn(f64) -> Box<dyn ShapeFamily> + Send + Sync + 'static,
    {
        self.builders.insert(name.to_string(), Arc::new(builder));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.builders.keys().map(String::as_str)
    }

    pub fn build(&self, name: &str, time: f64) -> Result<Box<dyn ShapeFamily>> {
        if !(time.is_finite() && time > 0.0) {
            return Err(ShaperError::InvalidSpec(format!("characteristic time {time} must be positive")));
        }
        let builder = self.builders.get(name).ok_or_else(|| ShaperError::UnknownFamily(name.to_string()))?;
        Ok(builder(time))
    }
}

impl Default for ShapeRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

fn builtin_registry() -> &'static ShapeRegistry {
    static REGISTRY: OnceLock<ShapeRegistry> = OnceLock::new();
    REGISTRY.get_or_init(ShapeRegistry::with_builtins)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    /// A registered analytic family with its characteristic time (µs).
    Analytic { name: String, time: f64 },
    /// Sampled amplitudes, one per grid cell; normalized on construction.
    Custom { samples: Vec<Complex64> },
}

/// Multiplies the amplitude by exp(iΔφ) for t ≥ `time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseJump {
    pub time: f64,
    pub delta_phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeSpec {
    pub family: FamilySpec,
    pub phase_jump: Option<PhaseJump>,
    /// (t_min, t_max) in µs.
    pub window: (f64, f64),
    /// Number of grid cells; ignored for custom shapes.
    pub samples: usize,
}

impl ShapeSpec {
    pub fn analytic(name: &str, time: f64, window: (f64, f64), samples: usize) -> Self {
        Self { family: FamilySpec::Analytic { name: name.to_string(), time }, phase_jump: None, window, samples }
    }

    /// sech(t/T) on the window ±`half_width`·T.
    pub fn sech(t: f64, half_width: f64, samples: usize) -> Self {
        Self::analytic("sech", t, (-half_width * t, half_width * t), samples)
    }

    /// Square pulse of length T filling the window [0, T].
    pub fn square(t: f64, samples: usize) -> Self {
        Self::analytic("square", t, (0.0, t), samples)
    }

    pub fn gaussian(sigma: f64, half_width: f64, samples: usize) -> Self {
        Self::analytic("gaussian", sigma, (-half_width * sigma, half_width * sigma), samples)
    }

    pub fn custom(samples: Vec<Complex64>, window: (f64, f64)) -> Self {
        let n = samples.len();
        Self { family: FamilySpec::Custom { samples }, phase_jump: None, window, samples: n }
    }

    pub fn with_phase_jump(mut self, time: f64, delta_phi: f64) -> Self {
        self.phase_jump = Some(PhaseJump { time, delta_phi });
        self
    }
}

pub fn make_shape(spec: &ShapeSpec) -> Result<TemporalMode> {
    make_shape_with(builtin_registry(), spec)
}

pub fn make_shape_with(registry: &ShapeRegistry, spec: &ShapeSpec) -> Result<TemporalMode> {
    let (t_min, t_max) = spec.window;
    if !(t_min.is_finite() && t_max.is_finite() && t_max > t_min) {
        return Err(ShaperError::InvalidSpec(format!("window ({t_min}, {t_max}) is empty")));
    }
    let n = match &spec.family {
        FamilySpec::Analytic { .. } => spec.samples,
        FamilySpec::Custom { samples } => samples.len(),
    };
    if n == 0 {
        return Err(ShaperError::TooFewSamples { got: 0, min: crate::MIN_SAMPLES });
    }
    let dt = (t_max - t_min) / n as f64;
    // Sample times measured from the window centre, so that a window
    // symmetric about zero yields bit-for-bit mirrored sample times.
    let centre = 0.5 * (t_min + t_max);
    let half = 0.5 * (n - 1) as f64;
    let sample_time = |j: usize| centre + (j as f64 - half) * dt;
    let t0 = sample_time(0);
    let mut samples: Vec<Complex64> = match &spec.family {
        FamilySpec::Analytic { name, time } => {
            let family = registry.build(name, *time)?;
            let captured = family.energy_fraction(t_min, t_max);
            if captured < MIN_CAPTURED_ENERGY {
                return Err(ShaperError::WindowTooSmall { captured });
            }
            (0..n).map(|j| Complex64::new(family.amplitude(sample_time(j)), 0.0)).collect()
        }
        FamilySpec::Custom { samples } => samples.clone(),
    };
    if let Some(jump) = spec.phase_jump {
        let factor = Complex64::from_polar(1.0, jump.delta_phi);
        for (j, s) in samples.iter_mut().enumerate() {
            if sample_time(j) >= jump.time {
                *s *= factor;
            }
        }
    }
    TemporalMode::normalized(t0, dt, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_family_is_reported() {
        let err = make_shape(&ShapeSpec::analytic("lorentzian", 1.0, (-5.0, 5.0), 64)).unwrap_err();
        assert!(matches!(err, ShaperError::UnknownFamily(n) if n == "lorentzian"));
    }

    #[test]
    fn narrow_window_is_rejected() {
        let err = make_shape(&ShapeSpec::sech(0.5, 2.0, 200)).unwrap_err();
        assert!(matches!(err, ShaperError::WindowTooSmall { .. }));
    }

    #[test]
    fn custom_family_can_be_registered() {
        struct Triangle(f64);
        impl ShapeFamily for Triangle {
            fn name(&self) -> &str {
                "triangle"
            }
            fn amplitude(&self, t: f64) -> f64 {
                (1.0 - (t / self.0).abs()).max(0.0)
            }
            fn energy_fraction(&self, t_min: f64, t_max: f64) -> f64 {
                if t_min <= -self.0 && t_max >= self.0 { 1.0 } else { 0.0 }
            }
        }
        let mut r = ShapeRegistry::with_builtins();
        r.register("triangle", |t| Box::new(Triangle(t)));
        let m = make_shape_with(&r, &ShapeSpec::analytic("triangle", 1.0, (-1.0, 1.0), 32)).unwrap();
        assert!((m.norm() - 1.0).abs() < 1e-12);
        assert!(r.names().any(|n| n == "triangle"));
    }

    #[test]
    fn symmetric_window_gives_mirror_grid() {
        let m = make_shape(&ShapeSpec::sech(0.5, 10.0, 100)).unwrap();
        assert!((m.t0() + m.time(99)).abs() < 1e-12);
    }
}
