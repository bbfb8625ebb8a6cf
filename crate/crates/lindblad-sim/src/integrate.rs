//! Explicit Runge–Kutta integrators for complex linear ODE systems, looked up
//! by name in an [`IntegratorRegistry`].

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Result, SimError};

pub trait OdeSystem: Sync {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]);
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

pub trait Integrator: Send + Sync {
    fn name(&self) -> &str;
    /// Advances `y` from `t0` to `t1`.
    fn advance(&self, sys: &dyn OdeSystem, t0: f64, t1: f64, y: &mut [Complex64], stats: &mut StepStats) -> Result<()>;
    /// Whether the integrator uses a fixed step that must satisfy the
    /// resolution bound.
    fn fixed_step(&self) -> Option<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSettings {
    /// Fixed step (µs) for `rk4`, or the largest step for adaptive methods.
    pub step: f64,
    pub rtol: f64,
    pub atol: f64,
}

fn axpy(out: &mut [Complex64], y: &[Complex64], h: f64, terms: &[(&[Complex64], f64)]) {
    for i in 0..out.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in terms {
            acc += k[i] * *c;
        }
        out[i] = y[i] + acc * h;
    }
}

/// Classical fourth-order Runge–Kutta with a fixed step.
pub struct Rk4 {
    pub step: f64,
}

impl Integrator for Rk4 {
    fn name(&self) -> &str {
        "rk4"
    }

    fn fixed_step(&self) -> Option<f64> {
        Some(self.step)
    }

    fn advance(&self, sys: &dyn OdeSystem, t0: f64, t1: f64, y: &mut [Complex64], stats: &mut StepStats) -> Result<()> {
        let span = t1 - t0;
        if span <= 0.0 {
            return Ok(());
        }
        let n_steps = (span / self.step * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let h = span / n_steps as f64;
        let n = sys.dim();
        let zero = Complex64::new(0.0, 0.0);
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
        for s in 0..n_steps {
            let t = t0 + s as f64 * h;
            sys.rhs(t, y, &mut k1);
            axpy(&mut tmp, y, h, &[(&k1, 0.5)]);
            sys.rhs(t + 0.5 * h, &tmp, &mut k2);
            axpy(&mut tmp, y, h, &[(&k2, 0.5)]);
            sys.rhs(t + 0.5 * h, &tmp, &mut k3);
            axpy(&mut tmp, y, h, &[(&k3, 1.0)]);
            sys.rhs(t + h, &tmp, &mut k4);
            for i in 0..n {
                y[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
            }
            stats.accepted += 1;
            stats.rhs_evals += 4;
        }
        Ok(())
    }
}

/// Dormand–Prince 5(4) with standard step-size control. The step is carried
/// over between calls.
pub struct Dopri5 {
    pub max_step: f64,
    pub rtol: f64,
    pub atol: f64,
    last_step: std::sync::Mutex<f64>,
}

impl Dopri5 {
    pub fn new(max_step: f64, rtol: f64, atol: f64) -> Self {
        Self { max_step, rtol, atol, last_step: std::sync::Mutex::new(max_step * 0.01) }
    }
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
/// Fifth-order weights minus the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

impl Integrator for Dopri5 {
    fn name(&self) -> &str {
        "dopri5"
    }

    fn fixed_step(&self) -> Option<f64> {
        None
    }

    fn advance(&self, sys: &dyn OdeSystem, t0: f64, t1: f64, y: &mut [Complex64], stats: &mut StepStats) -> Result<()> {
        let n = sys.dim();
        let zero = Complex64::new(0.0, 0.0);
        let mut k: Vec<Vec<Complex64>> = vec![vec![zero; n]; 7];
        let mut tmp = vec![zero; n];
        let mut y_new = vec![zero; n];
        let mut h = self.last_step.lock().map(|g| *g).unwrap_or(self.max_step).min(self.max_step);
        let mut t = t0;
        sys.rhs(t, y, &mut k[0]);
        stats.rhs_evals += 1;
        while t < t1 {
            let last = t + h >= t1;
            let step = if last { t1 - t } else { h };
            for s in 0..6 {
                for i in 0..n {
                    let mut acc = zero;
                    for (j, kj) in k.iter().enumerate().take(s + 1) {
                        acc += kj[i] * A[s][j];
                    }
                    tmp[i] = y[i] + acc * step;
                }
                if s == 5 {
                    y_new.copy_from_slice(&tmp);
                }
                sys.rhs(t + C[s] * step, &tmp, &mut k[s + 1]);
                stats.rhs_evals += 1;
            }
            let mut err2 = 0.0;
            for i in 0..n {
                let mut e = zero;
                for (j, kj) in k.iter().enumerate() {
                    e += kj[i] * E[j];
                }
                let scale = self.atol + self.rtol * y[i].norm().max(y_new[i].norm());
                err2 += (e.norm() * step / scale).powi(2);
            }
            let err = (err2 / n as f64).sqrt();
            if !err.is_finite() {
                return Err(SimError::IntegratorFailure { time: t, reason: "non-finite error estimate".into() });
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                t = if last { t1 } else { t + step };
                y.copy_from_slice(&y_new);
                k.swap(0, 6);
                stats.accepted += 1;
                if !last {
                    h = (step * factor).min(self.max_step);
                }
            } else {
                stats.rejected += 1;
                h = step * factor;
                if h < 1e-14 * t1.abs().max(1.0) {
                    return Err(SimError::IntegratorFailure { time: t, reason: "step size underflow".into() });
                }
            }
        }
        if let Ok(mut g) = self.last_step.lock() {
            *g = h;
        }
        Ok(())
    }
}

type Builder = Arc<dyn Fn(&IntegratorSettings) -> Box<dyn Integrator> + Send + Sync>;

#[derive(Clone)]
pub struct IntegratorRegistry {
    builders: BTreeMap<String, Builder>,
}

impl IntegratorRegistry {
    pub fn empty() -> Self {
        Self { builders: BTreeMap::new() }
    }

    /// `rk4` (fixed step) and `dopri5` (adaptive).
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register("rk4", |s| Box::new(Rk4 { step: s.step }));
        r.register("dopri5", |s| Box::new(Dopri5::new(s.step, s.rtol, s.atol)));
        r
    }

    pub fn register<F>(&mut self, name: &str, builder: F)
    where
        F: Fn(&IntegratorSettings) -> Box<dyn Integrator> + Send + Sync + 'static,
    {
        self.builders.insert(name.to_string(), Arc::new(builder));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.builders.keys().map(String::as_str)
    }

    pub fn build(&self, name: &str, settings: &IntegratorSettings) -> Result<Box<dyn Integrator>> {
        let b = self.builders.get(name).ok_or_else(|| SimError::UnknownIntegrator(name.to_string()))?;
        Ok(b(settings))
    }
}

impl Default for IntegratorRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}
