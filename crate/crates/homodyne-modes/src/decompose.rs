use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::correlation::Correlation;
use crate::records::Grid;
use crate::{HomodyneError, Result};

/// Largest |a_ij − a_ji|, relative to max(1, max|a|), accepted as symmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Eigenpairs of the vacuum-normalized correlation, largest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeDecomposition {
    pub grid: Grid,
    pub trials: Option<usize>,
    /// κ_i, descending.
    pub eigenvalues: Vec<f64>,
    /// Real f_i with Σ_j f_i(t_j) f_k(t_j) dt = δ_ik. The sign is fixed so
    /// the largest-magnitude sample is positive.
    pub eigenfunctions: Vec<Vec<f64>>,
}

impl ModeDecomposition {
    /// n_i = (κ_i − 1)/2.
    pub fn photon_numbers(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|k| 0.5 * (k - 1.0)).collect()
    }

    /// Σκ_i − n_bins = 2·(total mean photon number).
    pub fn excess_trace(&self) -> f64 {
        self.eigenvalues.iter().sum::<f64>() - self.grid.n_bins as f64
    }

    /// max |Σ f_i f_k dt − δ_ik|.
    pub fn orthonormality_residual(&self) -> f64 {
        let dt = self.grid.dt;
        let mut worst: f64 = 0.0;
        for (i, fi) in self.eigenfunctions.iter().enumerate() {
            for (k, fk) in self.eigenfunctions.iter().enumerate().skip(i) {
                let dot: f64 = fi.iter().zip(fk).map(|(a, b)| a * b).sum::<f64>() * dt;
                worst = worst.max((dot - if i == k { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(HomodyneError::InvalidInput(format!("{}×{} matrix is not square", m.nrows(), m.ncols())));
    }
    let scale = m.amax().max(1.0);
    let asym = (m - m.transpose()).amax();
    if asym > SYMMETRY_TOLERANCE * scale {
        return Err(HomodyneError::NotSymmetric(asym));
    }
    Ok(())
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Diagonalizes V^{-1/2} C V^{-1/2}, the correlation in units of the vacuum
/// reference.
pub fn decompose(corr: &Correlation, vacuum: &Correlation) -> Result<ModeDecomposition> {
    if !corr.grid.same_as(&vacuum.grid) {
        return Err(HomodyneError::InvalidInput("correlation and vacuum reference live on different grids".into()));
    }
    check_symmetric(&corr.matrix)?;
    check_symmetric(&vacuum.matrix)?;
    let n = corr.grid.n_bins;
    if corr.matrix.nrows() != n || vacuum.matrix.nrows() != n {
        return Err(HomodyneError::InvalidInput(format!("matrix size does not match {n} bins")));
    }

    let v = SymmetricEigen::new(symmetrize(&vacuum.matrix));
    let smallest = v.eigenvalues.min();
    if !(smallest > 0.0) {
        return Err(HomodyneError::VacuumNotPositive(smallest));
    }
    let inv_sqrt = &v.eigenvectors * DMatrix::from_diagonal(&v.eigenvalues.map(|l| l.sqrt().recip())) * v.eigenvectors.transpose();
    let normalized = symmetrize(&(&inv_sqrt * &corr.matrix * &inv_sqrt));

    let eig = SymmetricEigen::new(normalized);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let scale = corr.grid.dt.sqrt().recip();
    let eigenfunctions = order
        .iter()
        .map(|&k| {
            let col = eig.eigenvectors.column(k);
            let pivot = col.iter().copied().fold(0.0, |best: f64, x| if x.abs() > best.abs() { x } else { best });
            let sign = if pivot < 0.0 { -scale } else { scale };
            col.iter().map(|x| x * sign).collect()
        })
        .collect();
    Ok(ModeDecomposition {
        grid: corr.grid,
        trials: corr.trials,
        eigenvalues: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        eigenfunctions,
    })
}
