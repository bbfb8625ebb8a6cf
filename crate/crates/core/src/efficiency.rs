use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adiabatic::adiabatic_coeffs;
use crate::params::CqedParams;
use crate::reference::ReferenceData;
use crate::scheme::{build_scheme, LevelScheme, ModelVariant};
use crate::{CoreError, Result};

/// Emission (equivalently absorption) efficiency of the adiabatic model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Efficiency {
    /// η = η_esc · calibration · |L|²/(2 Re K), limited to [0, 1].
    pub value: f64,
    /// The unclamped value.
    pub raw: f64,
    /// Set when `raw` exceeded one by more than rounding.
    pub over_unity: bool,
}

pub fn emission_efficiency(params: &CqedParams, scheme: &LevelScheme) -> Result<Efficiency> {
    let coeffs = adiabatic_coeffs(params, scheme)?;
    if coeffs.k.re <= 0.0 {
        return Err(CoreError::UncoupledStorage(coeffs.k.re));
    }
    let raw = params.escape_efficiency() * coeffs.transfer_efficiency();
    Ok(Efficiency { value: raw.clamp(0.0, 1.0), raw, over_unity: raw > 1.0 + 1e-12 })
}

/// Far-detuned limit of the efficiency, where all excited manifolds act as a
/// single virtual level:
/// η_esc · 2C (Σ c_g c_s)² / (Σ c_s² + 2C (Σ c_g c_s)²).
pub fn raman_limit(params: &CqedParams, scheme: &LevelScheme) -> f64 {
    let c = &scheme.coupling;
    let path: f64 = c.c_g.iter().zip(&c.c_s).map(|(g, s)| g * s).sum();
    let drive: f64 = c.c_s.iter().map(|s| s * s).sum();
    let two_c = 2.0 * params.cooperativity();
    params.escape_efficiency() * two_c * path * path / (drive + two_c * path * path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Detuning, MHz.
    pub delta: f64,
    /// Efficiency, or the reason this point could not be evaluated.
    pub efficiency: std::result::Result<f64, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyCurve {
    pub variant: ModelVariant,
    pub points: Vec<SweepPoint>,
}

impl EfficiencyCurve {
    /// Detuning and value of the smallest evaluated efficiency.
    pub fn minimum(&self) -> Option<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.efficiency.as_ref().ok().map(|e| (p.delta, *e)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Minimum of the curve restricted to `lo..=hi`, refined by a parabola
    /// through the lowest sample and its neighbours.
    pub fn refined_minimum_within(&self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|p| p.delta >= lo && p.delta <= hi)
            .filter_map(|p| p.efficiency.as_ref().ok().map(|e| (p.delta, *e)))
            .collect();
        let (i, _) = pts.iter().enumerate().min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))?;
        if i == 0 || i + 1 == pts.len() {
            return Some(pts[i]);
        }
        Some(parabolic_vertex(pts[i - 1], pts[i], pts[i + 1]))
    }
}

/// Vertex of the parabola through three points.
pub fn parabolic_vertex((x0, y0): (f64, f64), (x1, y1): (f64, f64), (x2, y2): (f64, f64)) -> (f64, f64) {
    let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    if a <= 0.0 {
        return (x1, y1);
    }
    let xv = -b / (2.0 * a);
    let c = y0 - a * x0 * x0 - b * x0;
    (xv, a * xv * xv + b * xv + c)
}

/// Efficiency on a uniform grid of `n_points` detunings spanning `range`
/// (MHz, inclusive). Points that fail are recorded, not fatal.
pub fn efficiency_sweep(
    params: &CqedParams,
    variant: ModelVariant,
    range: (f64, f64),
    n_points: usize,
    reference: &ReferenceData,
) -> Result<EfficiencyCurve> {
    let (lo, hi) = range;
    if n_points < 2 || !(hi > lo) {
        return Err(CoreError::InvalidSweep);
    }
    let base = build_scheme(params, lo, variant, reference)?;
    let step = (hi - lo) / (n_points - 1) as f64;
    let points = (0..n_points)
        .into_par_iter()
        .map(|i| {
            let delta = if i + 1 == n_points { hi } else { lo + step * i as f64 };
            let efficiency = emission_efficiency(params, &base.with_delta(delta)).map(|e| e.value).map_err(|e| e.to_string());
            SweepPoint { delta, efficiency }
        })
        .collect();
    Ok(EfficiencyCurve { variant, points })
}
