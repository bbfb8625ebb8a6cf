use std::f64::consts::{PI, TAU};

use cqed_core::emission_efficiency;
use pulse_shaper::{make_shape, selection_efficiency, ShapeSpec};
use serde::Serialize;

use super::{csv, Command, Context};
use crate::config::ExperimentConfig;
use crate::{CliError, Result};

/// Least-squares fit of A·sin²(Δφ/2 + φ₀) + B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SinFit {
    pub amplitude: f64,
    pub offset: f64,
    /// In [0, π).
    pub phi0: f64,
    pub rms_residual: f64,
}

impl SinFit {
    pub fn eval(&self, dphi: f64) -> f64 {
        self.amplitude * (0.5 * dphi + self.phi0).sin().powi(2) + self.offset
    }
}

/// Solves the normal equations for y ≈ c₀ + c₁cos x + c₂sin x.
pub fn fit_sin2(x: &[f64], y: &[f64]) -> Result<SinFit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(CliError::Fit("need at least three points".into()));
    }
    let mut m = [[0.0; 4]; 3];
    for (&xi, &yi) in x.iter().zip(y) {
        let basis = [1.0, xi.cos(), xi.sin()];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += basis[r] * basis[c];
            }
            m[r][3] += basis[r] * yi;
        }
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).expect("rows");
        if m[pivot][col].abs() < 1e-12 * x.len() as f64 {
            return Err(CliError::Fit("phase samples do not determine the curve".into()));
        }
        m.swap(col, pivot);
        for r in 0..3 {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..4 {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    let [c0, c1, c2] = [0, 1, 2].map(|r| m[r][3] / m[r][r]);
    let amplitude = 2.0 * c1.hypot(c2);
    let phi0 = (0.5 * c2.atan2(-c1)).rem_euclid(PI);
    let fit = SinFit { amplitude, offset: c0 - 0.5 * amplitude, phi0, rms_residual: 0.0 };
    let rms = (x.iter().zip(y).map(|(&xi, &yi)| (fit.eval(xi) - yi).powi(2)).sum::<f64>() / x.len() as f64).sqrt();
    Ok(SinFit { rms_residual: rms, ..fit })
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectReport {
    pub eta0: f64,
    pub dphi: Vec<f64>,
    /// Phase jump on the input photon, control designed for the plain shape.
    pub input_jump: Vec<f64>,
    /// Control designed for a π-jumped shape, phase jump Δφ on the input.
    pub control_jump: Vec<f64>,
    pub input_fit: SinFit,
    pub control_fit: SinFit,
    /// Shift s with control(Δφ) = input(Δφ − s), from the fitted phases.
    pub fitted_shift: f64,
    /// max |control(Δφ) − input(Δφ − π)| over the grid, evaluated directly.
    pub shift_residual: f64,
    pub efficiency_at_pi: f64,
}

pub fn run_select(cfg: &ExperimentConfig) -> Result<SelectReport> {
    let eta0 = emission_efficiency(&cfg.cqed_params()?, &cfg.model_scheme()?)?.value;
    let base: ShapeSpec = ShapeSpec { phase_jump: None, ..cfg.shape.spec()? };
    let t_jump = cfg.select.jump_time.0;
    let jumped = |dphi: f64| make_shape(&base.clone().with_phase_jump(t_jump, dphi));
    let plain = make_shape(&base)?;
    let control_pi = jumped(PI)?;

    let n = cfg.select.points;
    let dphi: Vec<f64> = (0..n).map(|k| TAU * k as f64 / (n - 1) as f64).collect();
    let curve = |accepted: &pulse_shaper::TemporalMode, shift: f64| -> Result<Vec<f64>> {
        dphi.iter().map(|&p| Ok(selection_efficiency(&jumped(p - shift)?, accepted, eta0)?)).collect()
    };
    let input_jump = curve(&plain, 0.0)?;
    let control_jump = curve(&control_pi, 0.0)?;
    let input_shifted = curve(&plain, PI)?;
    let shift_residual = control_jump.iter().zip(&input_shifted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let input_fit = fit_sin2(&dphi, &input_jump)?;
    let control_fit = fit_sin2(&dphi, &control_jump)?;
    let fitted_shift = (2.0 * (input_fit.phi0 - control_fit.phi0)).rem_euclid(TAU);
    let efficiency_at_pi = selection_efficiency(&jumped(PI)?, &plain, eta0)?;
    Ok(SelectReport { eta0, dphi, input_jump, control_jump, input_fit, control_fit, fitted_shift, shift_residual, efficiency_at_pi })
}

pub struct Select;

impl Command for Select {
    fn name(&self) -> &'static str {
        "select"
    }

    fn about(&self) -> &'static str {
        "Storage efficiency versus phase jump, for input-side and control-side jumps"
    }

    fn run(&self, ctx: &mut Context<'_>) -> Result<()> {
        let r = run_select(ctx.config)?;
        let rows = (0..r.dphi.len()).map(|k| vec![r.dphi[k], r.input_jump[k], r.control_jump[k], r.input_fit.eval(r.dphi[k]), r.control_fit.eval(r.dphi[k])]);
        ctx.out.write("selectivity.csv", csv(&["dphi_rad", "input_jump", "control_jump", "input_fit", "control_fit"], rows))?;
        #[derive(Serialize)]
        struct Fits {
            eta0: f64,
            input_fit: SinFit,
            control_fit: SinFit,
            fitted_shift: f64,
            shift_residual: f64,
            efficiency_at_pi: f64,
        }
        ctx.out.write_json(
            "selectivity.json",
            &Fits { eta0: r.eta0, input_fit: r.input_fit, control_fit: r.control_fit, fitted_shift: r.fitted_shift, shift_residual: r.shift_residual, efficiency_at_pi: r.efficiency_at_pi },
        )
    }
}
