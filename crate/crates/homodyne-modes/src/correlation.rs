use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::records::{Grid, QuadratureRecords};
use crate::Result;

/// Trials per partial sum. Partial sums are added in trial order, so the
/// result is the same for any number of workers.
const CHUNK: usize = 512;

/// ⟨x(t_i) x(t_j)⟩ over trials, tagged with its grid and sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub grid: Grid,
    /// Number of trials behind the estimate; `None` for an exact matrix.
    pub trials: Option<usize>,
    pub matrix: DMatrix<f64>,
}

impl Correlation {
    /// The exact shot-noise reference, the identity.
    pub fn vacuum(grid: Grid) -> Self {
        Self { grid, trials: None, matrix: DMatrix::identity(grid.n_bins, grid.n_bins) }
    }

    pub fn exact(grid: Grid, matrix: DMatrix<f64>) -> Self {
        Self { grid, trials: None, matrix }
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }
}

/// Unbiased second-moment matrix. Without mean subtraction the mean is taken
/// as zero and the sum is divided by the number of trials; with it, by
/// trials − 1.
pub fn autocorrelation(records: &QuadratureRecords, subtract_mean: bool) -> Result<Correlation> {
    records.require_trials(2)?;
    let n = records.n_bins();
    let trials = records.trials();
    let mean = if subtract_mean {
        let mut m = vec![0.0; n];
        for row in records.iter() {
            m.iter_mut().zip(row).for_each(|(a, x)| *a += x);
        }
        m.iter_mut().for_each(|a| *a /= trials as f64);
        Some(m)
    } else {
        None
    };

    let partials: Vec<Vec<f64>> = records
        .data()
        .par_chunks(CHUNK * n)
        .map(|block| {
            let mut acc = vec![0.0; n * n];
            let mut centred = vec![0.0; n];
            for row in block.chunks_exact(n) {
                match &mean {
                    Some(m) => centred.iter_mut().zip(row.iter().zip(m)).for_each(|(c, (x, mu))| *c = x - mu),
                    None => centred.copy_from_slice(row),
                }
                for i in 0..n {
                    let xi = centred[i];
                    let line = &mut acc[i * n..i * n + i + 1];
                    line.iter_mut().zip(&centred[..=i]).for_each(|(a, xj)| *a += xi * xj);
                }
            }
            acc
        })
        .collect();

    let mut sum = vec![0.0; n * n];
    for p in &partials {
        sum.iter_mut().zip(p).for_each(|(s, v)| *s += v);
    }
    let denom = if subtract_mean { trials - 1 } else { trials } as f64;
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        let (a, b) = if i >= j { (i, j) } else { (j, i) };
        sum[a * n + b] / denom
    });
    Ok(Correlation { grid: records.grid(), trials: Some(trials), matrix })
}
