use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{HomodyneError, Result};

/// Fewest trials accepted by the statistical operations.
pub const MIN_TRIALS: usize = 100;

/// Time bins t_j = t0 + j·dt, j < n_bins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub t0: f64,
    pub dt: f64,
    pub n_bins: usize,
}

impl Grid {
    pub fn new(t0: f64, dt: f64, n_bins: usize) -> Result<Self> {
        let grid = Self { t0, dt, n_bins };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid of `mode`.
    pub fn of(mode: &pulse_shaper::TemporalMode) -> Self {
        Self { t0: mode.t0(), dt: mode.dt(), n_bins: mode.len() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.dt.is_finite() && self.dt > 0.0) || self.n_bins < 2 {
            return Err(HomodyneError::DegenerateGrid(format!("t0 {}, dt {}, n_bins {}", self.t0, self.dt, self.n_bins)));
        }
        Ok(())
    }

    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn same_as(&self, other: &Self) -> bool {
        let tol = 1e-9 * self.dt;
        self.n_bins == other.n_bins && (self.dt - other.dt).abs() <= tol && (self.t0 - other.t0).abs() <= tol
    }
}

/// Quadrature samples, one row of `n_bins` values per trial, normalized so the
/// vacuum variance per bin is 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRecords {
    grid: Grid,
    trials: usize,
    data: Vec<f64>,
}

impl QuadratureRecords {
    pub fn new(grid: Grid, data: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if data.is_empty() || data.len() % grid.n_bins != 0 {
            return Err(HomodyneError::InvalidInput(format!("{} values do not fill rows of {} bins", data.len(), grid.n_bins)));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(HomodyneError::InvalidInput(format!("non-finite entry in trial {}", i / grid.n_bins)));
        }
        Ok(Self { trials: data.len() / grid.n_bins, grid, data })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn n_bins(&self) -> usize {
        self.grid.n_bins
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn trial(&self, k: usize) -> &[f64] {
        let n = self.grid.n_bins;
        &self.data[k * n..(k + 1) * n]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.grid.n_bins)
    }

    pub(crate) fn require_trials(&self, min: usize) -> Result<()> {
        if self.trials < min {
            return Err(HomodyneError::TooFewTrials { got: self.trials, min });
        }
        Ok(())
    }
}

/// Header line `# t0=…,dt=…,n_bins=…,trials=…,normalization=shot_noise`,
/// then one comma-separated row per trial.
pub fn records_to_csv(records: &QuadratureRecords) -> String {
    let g = records.grid;
    let mut out = format!("# t0={},dt={},n_bins={},trials={},normalization=shot_noise\n", g.t0, g.dt, g.n_bins, records.trials);
    for row in records.iter() {
        for (j, x) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{x}");
        }
        out.push('\n');
    }
    out
}

pub fn records_from_csv(text: &str) -> Result<QuadratureRecords> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .and_then(|l| l.strip_prefix('#'))
        .ok_or_else(|| HomodyneError::Parse("missing '#' header".into()))?;
    let mut t0 = None;
    let mut dt = None;
    let mut n_bins = None;
    let mut trials = None;
    for field in header.split(',') {
        let (key, value) = field.trim().split_once('=').ok_or_else(|| HomodyneError::Parse(format!("bad header field '{field}'")))?;
        let bad = |_| HomodyneError::Parse(format!("bad value for {key}: '{value}'"));
        match key {
            "t0" => t0 = Some(value.parse::<f64>().map_err(bad)?),
            "dt" => dt = Some(value.parse::<f64>().map_err(bad)?),
            "n_bins" => n_bins = Some(value.parse::<usize>().map_err(|_| HomodyneError::Parse(format!("bad n_bins '{value}'")))?),
            "trials" => trials = Some(value.parse::<usize>().map_err(|_| HomodyneError::Parse(format!("bad trials '{value}'")))?),
            "normalization" if value != "shot_noise" => {
                return Err(HomodyneError::Parse(format!("unsupported normalization '{value}'")));
            }
            _ => {}
        }
    }
    let missing = |k: &str| HomodyneError::Parse(format!("header lacks {k}"));
    let grid = Grid::new(t0.ok_or_else(|| missing("t0"))?, dt.ok_or_else(|| missing("dt"))?, n_bins.ok_or_else(|| missing("n_bins"))?)?;
    let trials = trials.ok_or_else(|| missing("trials"))?;

    let mut data = Vec::with_capacity(trials * grid.n_bins);
    for (k, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
        let before = data.len();
        for v in line.split(',') {
            data.push(v.trim().parse::<f64>().map_err(|_| HomodyneError::Parse(format!("row {k}: bad value '{v}'")))?);
        }
        if data.len() - before != grid.n_bins {
            return Err(HomodyneError::Parse(format!("row {k} has {} values, expected {}", data.len() - before, grid.n_bins)));
        }
    }
    let records = QuadratureRecords::new(grid, data)?;
    if records.trials != trials {
        return Err(HomodyneError::Parse(format!("header says {trials} trials, found {}", records.trials)));
    }
    Ok(records)
}

pub fn write_records(path: impl AsRef<Path>, records: &QuadratureRecords) -> Result<()> {
    Ok(std::fs::write(path, records_to_csv(records))?)
}

pub fn read_records(path: impl AsRef<Path>) -> Result<QuadratureRecords> {
    records_from_csv(&std::fs::read_to_string(path)?)
}
