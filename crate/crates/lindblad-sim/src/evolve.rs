use cqed_core::units::angular;
use cqed_core::{CqedParams, LevelScheme};
use num_complex::Complex64;
use pulse_shaper::ControlPulse;
use serde::{Deserialize, Serialize};

use crate::integrate::{IntegratorRegistry, IntegratorSettings, OdeSystem, StepStats};
use crate::operators::{build_collapse_ops, hamiltonian_parts, CollapseTarget};
use crate::space::{HilbertSpaceSpec, Polarization};
use crate::{Result, SimError};

/// Fixed steps must satisfy dt · 2π · (fastest rate) below this.
pub const STEP_RESOLUTION: f64 = 0.1;

/// Control field sampled on a uniform grid, linearly interpolated and zero
/// outside the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Drive {
    pub t0: f64,
    pub dt: f64,
    /// Rabi frequency, linear MHz.
    pub omega: Vec<Complex64>,
}

impl Drive {
    pub fn none() -> Self {
        Self { t0: 0.0, dt: 1.0, omega: Vec::new() }
    }

    pub fn from_pulse(pulse: &ControlPulse) -> Self {
        Self { t0: pulse.t0, dt: pulse.dt, omega: pulse.omega.clone() }
    }

    /// Ω(t), linear MHz.
    pub fn at(&self, t: f64) -> Complex64 {
        let n = self.omega.len();
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let x = (t - self.t0) / self.dt;
        if x < 0.0 || x > (n - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let i = (x.floor() as usize).min(n.saturating_sub(2));
        if n == 1 {
            return self.omega[0];
        }
        let w = x - i as f64;
        self.omega[i] * (1.0 - w) + self.omega[i + 1] * w
    }

    pub fn max_abs(&self) -> f64 {
        self.omega.iter().map(|w| w.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// First output time, µs.
    pub t_start: f64,
    /// Output spacing, µs.
    pub dt_out: f64,
    /// Number of output times including the first.
    pub n_out: usize,
    /// Registered integrator name, `rk4` or `dopri5`.
    pub integrator: String,
    /// Fixed step (rk4) or step ceiling (dopri5), µs. `None` picks the
    /// resolution bound.
    pub step: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
    pub drive: Drive,
    /// Sector index of the initial pure state; `None` is the storage state.
    pub initial: Option<usize>,
    /// Largest tolerated |trace − 1| before the run is aborted.
    pub trace_tolerance: f64,
}

impl SimConfig {
    pub fn new(t_start: f64, dt_out: f64, n_out: usize, drive: Drive) -> Self {
        Self {
            t_start,
            dt_out,
            n_out,
            integrator: "rk4".into(),
            step: None,
            rtol: 1e-8,
            atol: 1e-10,
            drive,
            initial: None,
            trace_tolerance: 1e-5,
        }
    }

    /// Output grid and drive taken from a pulse, extended by `extra` samples.
    pub fn for_pulse(pulse: &ControlPulse, extra: usize) -> Self {
        Self::new(pulse.t0, pulse.dt, pulse.len() + extra, Drive::from_pulse(pulse))
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t_start + j as f64 * self.dt_out
    }
}

/// Largest fixed step resolving every rate of the problem, µs. Manifolds
/// without any coupling in the model variant stay empty and do not count.
pub fn step_bound(params: &CqedParams, scheme: &LevelScheme, drive: &Drive) -> f64 {
    let v = scheme.variant;
    let detuning = (0..3)
        .filter(|&i| v.control_active(i) || v.cavity_active(i))
        .map(|i| scheme.detunings()[i].abs())
        .fold(0.0f64, f64::max);
    let fastest = [detuning, drive.max_abs(), params.kappa(), params.gamma, params.g].into_iter().fold(0.0, f64::max);
    STEP_RESOLUTION / angular(fastest)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub times: Vec<f64>,
    /// Reduced populations of the 21 atomic levels per output time.
    pub atomic_populations: Vec<Vec<f64>>,
    pub atomic_labels: Vec<String>,
    /// ⟨a_p†a_p⟩ per polarization (σ⁺, σ⁻).
    pub photon_number: [Vec<f64>; 2],
    /// Out-coupled photon flux 2κ_c⟨a_p†a_p⟩, per µs.
    pub flux_out: [Vec<f64>; 2],
    /// Cumulative out-coupled probability per polarization.
    pub out_coupled: [Vec<f64>; 2],
    /// Cumulative lost probability per polarization.
    pub lost: [Vec<f64>; 2],
    /// tr ρ plus all sink accumulators.
    pub trace: Vec<f64>,
    /// Out-field amplitude of the no-jump branch, √(2κ_c)·⟨signal|ψ⟩, µs^-½.
    pub coherent_amplitude: Vec<Complex64>,
    /// Cumulative out-coupled probability of the no-jump branch.
    pub coherent_out: Vec<f64>,
    pub max_trace_drift: f64,
    pub step: Option<f64>,
    pub stats: StepStats,
}

impl SimResult {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Final out-coupled probability of one polarization.
    pub fn efficiency(&self, p: Polarization) -> f64 {
        *self.out_coupled[p.index()].last().unwrap_or(&0.0)
    }

    pub fn coherent_efficiency(&self) -> f64 {
        *self.coherent_out.last().unwrap_or(&0.0)
    }

    /// Atomic population + intracavity photons + out-coupled + lost, per time.
    pub fn bookkeeping(&self) -> &[f64] {
        &self.trace
    }
}

struct Lindblad {
    n: usize,
    h0_eff: Vec<(usize, usize, Complex64)>,
    v: Vec<(usize, usize, Complex64)>,
    jumps: Vec<(usize, usize, usize, usize, Complex64)>,
    /// Per sink: entries of c†c.
    sinks: Vec<Vec<(usize, usize, Complex64)>>,
    signal: usize,
    coherent_rate: f64,
    drive: Drive,
}

impl Lindblad {
    fn rho_len(&self) -> usize {
        self.n * self.n
    }

    fn psi_offset(&self) -> usize {
        self.rho_len()
    }

    fn sink_offset(&self) -> usize {
        self.rho_len() + self.n
    }

    fn coherent_offset(&self) -> usize {
        self.sink_offset() + self.sinks.len()
    }

    fn apply_h(&self, omega: Complex64, x: &[Complex64], cols: usize, out: &mut [Complex64]) {
        // out = H_eff · x, x with `cols` columns.
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        let mut row = |i: usize, k: usize, c: Complex64| {
            let src = &x[k * cols..(k + 1) * cols];
            let dst = &mut out[i * cols..(i + 1) * cols];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += c * s;
            }
        };
        for &(i, k, c) in &self.h0_eff {
            row(i, k, c);
        }
        if omega != Complex64::new(0.0, 0.0) {
            for &(i, k, c) in &self.v {
                row(i, k, c * omega);
                row(k, i, c.conj() * omega.conj());
            }
        }
    }
}

impl OdeSystem for Lindblad {
    fn dim(&self) -> usize {
        self.coherent_offset() + 1
    }

    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let n = self.n;
        let omega = self.drive.at(t) * angular(1.0);
        let rho = &y[..self.rho_len()];
        let mut a = vec![Complex64::new(0.0, 0.0); self.rho_len()];
        self.apply_h(omega, rho, n, &mut a);
        let minus_i = Complex64::new(0.0, -1.0);
        for i in 0..n {
            let row = &mut dy[i * n..(i + 1) * n];
            for (j, d) in row.iter_mut().enumerate() {
                *d = minus_i * (a[i * n + j] - a[j * n + i].conj());
            }
        }
        for &(i, k, j, l, c) in &self.jumps {
            dy[i * n + k] += c * rho[j * n + l];
        }

        let psi = &y[self.psi_offset()..self.psi_offset() + n];
        let mut hpsi = vec![Complex64::new(0.0, 0.0); n];
        self.apply_h(omega, psi, 1, &mut hpsi);
        for i in 0..n {
            dy[self.psi_offset() + i] = minus_i * hpsi[i];
        }

        for (s, gram) in self.sinks.iter().enumerate() {
            let rate: f64 = gram.iter().map(|&(j, l, c)| (c * rho[l * n + j]).re).sum();
            dy[self.sink_offset() + s] = Complex64::new(rate, 0.0);
        }
        dy[self.coherent_offset()] = Complex64::new(self.coherent_rate * psi[self.signal].norm_sqr(), 0.0);
    }
}

/// Sink slots: out σ⁺, out σ⁻, lost σ⁺, lost σ⁻.
fn sink_slot(target: CollapseTarget) -> Option<usize> {
    match target {
        CollapseTarget::Internal => None,
        CollapseTarget::OutCoupled(p) => Some(p.index()),
        CollapseTarget::Lost(p) => Some(2 + p.index()),
    }
}

pub fn evolve(space: &HilbertSpaceSpec, params: &CqedParams, scheme: &LevelScheme, config: &SimConfig) -> Result<SimResult> {
    if !(config.dt_out > 0.0) || config.n_out == 0 {
        return Err(SimError::InvalidConfig("output grid needs dt_out > 0 and at least one sample".into()));
    }
    let n = space.dim();
    let initial = config.initial.unwrap_or_else(|| space.storage_state());
    if initial >= n {
        return Err(SimError::InvalidConfig(format!("initial state {initial} outside the {n}-state sector")));
    }

    let bound = step_bound(params, scheme, &config.drive);
    let step = config.step.unwrap_or(0.99 * bound);
    let integrator = IntegratorRegistry::with_builtins().build(
        &config.integrator,
        &IntegratorSettings { step: if config.integrator == "rk4" { step } else { config.step.unwrap_or(config.dt_out) }, rtol: config.rtol, atol: config.atol },
    )?;
    if let Some(h) = integrator.fixed_step() {
        if !(h > 0.0) || h > bound {
            return Err(SimError::InvalidConfig(format!("step {h} µs exceeds the resolution bound {bound:.3e} µs")));
        }
    }

    let parts = hamiltonian_parts(space, params, scheme)?;
    let collapse = build_collapse_ops(space, params, scheme)?;
    let mut h0_eff = parts.h0.clone();
    let mut jumps = Vec::new();
    let mut sinks = vec![Vec::new(); 4];
    for c in &collapse {
        h0_eff = h0_eff.plus(&c.op.gram().scaled(Complex64::new(0.0, -0.5)));
        match sink_slot(c.target) {
            None => {
                for &(i, j, a) in &c.op.entries {
                    for &(k, l, b) in &c.op.entries {
                        jumps.push((i, k, j, l, a * b.conj()));
                    }
                }
            }
            Some(s) => sinks[s].extend(c.op.gram().entries),
        }
    }
    let sys = Lindblad {
        n,
        h0_eff: h0_eff.compact().entries,
        v: parts.v.compact().entries,
        jumps,
        sinks,
        signal: space.signal_state(),
        coherent_rate: 2.0 * angular(params.kappa_c),
        drive: config.drive.clone(),
    };

    let mut y = vec![Complex64::new(0.0, 0.0); sys.dim()];
    y[initial * n + initial] = Complex64::new(1.0, 0.0);
    y[sys.psi_offset() + initial] = Complex64::new(1.0, 0.0);

    let n_atoms = space.atomic_levels.len();
    let mut result = SimResult {
        times: Vec::with_capacity(config.n_out),
        atomic_populations: Vec::with_capacity(config.n_out),
        atomic_labels: space.atomic_levels.iter().map(|a| a.label()).collect(),
        photon_number: [Vec::new(), Vec::new()],
        flux_out: [Vec::new(), Vec::new()],
        out_coupled: [Vec::new(), Vec::new()],
        lost: [Vec::new(), Vec::new()],
        trace: Vec::new(),
        coherent_amplitude: Vec::new(),
        coherent_out: Vec::new(),
        max_trace_drift: 0.0,
        step: integrator.fixed_step(),
        stats: StepStats::default(),
    };
    let kappa_c = 2.0 * angular(params.kappa_c);
    let states: Vec<_> = (0..n).map(|i| space.state(i)).collect();
    let atom_slot: Vec<usize> = states.iter().map(|s| space.atomic_index(s.atom).expect("atom")).collect();

    for j in 0..config.n_out {
        let t = config.time(j);
        if j > 0 {
            integrator.advance(&sys, config.time(j - 1), t, &mut y, &mut result.stats)?;
        }
        let mut atoms = vec![0.0; n_atoms];
        let mut photons = [0.0; 2];
        let mut trace = 0.0;
        for i in 0..n {
            let p = y[i * n + i].re;
            atoms[atom_slot[i]] += p;
            trace += p;
            for pol in Polarization::BOTH {
                if states[i].has(pol) {
                    photons[pol.index()] += p;
                }
            }
        }
        let sink = |s: usize| y[sys.sink_offset() + s].re;
        trace += (0..4).map(sink).sum::<f64>();
        let drift = (trace - 1.0).abs();
        if !(drift <= config.trace_tolerance) {
            return Err(SimError::IntegratorFailure { time: t, reason: format!("trace drifted to {trace}") });
        }
        result.max_trace_drift = result.max_trace_drift.max(drift);
        result.times.push(t);
        result.atomic_populations.push(atoms);
        for pol in Polarization::BOTH {
            let k = pol.index();
            result.photon_number[k].push(photons[k]);
            result.flux_out[k].push(kappa_c * photons[k]);
            result.out_coupled[k].push(sink(k));
            result.lost[k].push(sink(2 + k));
        }
        result.trace.push(trace);
        result.coherent_amplitude.push(kappa_c.sqrt() * y[sys.psi_offset() + sys.signal]);
        result.coherent_out.push(y[sys.coherent_offset()].re);
    }
    Ok(result)
}
