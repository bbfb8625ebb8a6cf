use serde::{Deserialize, Serialize};

use crate::{CoreError, Result};

/// Rate constants of the atom-cavity system, as linear frequencies in MHz
/// (the physical angular rates are 2π times these numbers).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CqedParams {
    /// Atom-cavity coupling constant.
    pub g: f64,
    /// Field decay rate through the output mirror.
    pub kappa_c: f64,
    /// Field decay rate through the back mirror and intracavity losses.
    pub kappa_l: f64,
    /// Atomic polarization decay rate.
    pub gamma: f64,
}

impl CqedParams {
    pub fn new(g: f64, kappa_c: f64, kappa_l: f64, gamma: f64) -> Result<Self> {
        let p = Self { g, kappa_c, kappa_l, gamma };
        p.validate()?;
        Ok(p)
    }

    /// The single-atom 87Rb setup: (g, κ_c, κ_l, γ) = 2π × (4.9, 2.4, 0.3, 3.03) MHz.
    pub fn rb87_setup() -> Self {
        Self { g: 4.9, kappa_c: 2.4, kappa_l: 0.3, gamma: 3.03 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("g", self.g), ("kappa_c", self.kappa_c), ("kappa_l", self.kappa_l), ("gamma", self.gamma)] {
            if !(v.is_finite() && v > 0.0) {
                // κ_l = 0 is the lossless-cavity limit and is allowed.
                if name == "kappa_l" && v == 0.0 {
                    continue;
                }
                return Err(CoreError::InvalidParams(format!("{name} = {v} must be strictly positive")));
            }
        }
        Ok(())
    }

    /// Total cavity field decay rate κ = κ_c + κ_l.
    pub fn kappa(&self) -> f64 {
        self.kappa_c + self.kappa_l
    }

    /// Cooperativity C = g² / (2κγ). Dimensionless, so the 2π factors cancel.
    pub fn cooperativity(&self) -> f64 {
        self.g * self.g / (2.0 * self.kappa() * self.gamma)
    }

    /// Escape efficiency η_esc = κ_c / (κ_c + κ_l).
    pub fn escape_efficiency(&self) -> f64 {
        self.kappa_c / self.kappa()
    }

    /// Ideal transfer efficiency 2C / (2C + 1) of a single Λ-system.
    pub fn ideal_efficiency(&self) -> f64 {
        let c2 = 2.0 * self.cooperativity();
        c2 / (c2 + 1.0)
    }

    /// η_esc · 2C/(2C+1): the photon-production efficiency of an ideal Λ-system
    /// in this cavity.
    pub fn ideal_output_efficiency(&self) -> f64 {
        self.escape_efficiency() * self.ideal_efficiency()
    }

    /// Same cavity with both mirror rates scaled by `factor`.
    pub fn with_scaled_cavity(&self, factor: f64) -> Self {
        Self { kappa_c: self.kappa_c * factor, kappa_l: self.kappa_l * factor, ..*self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cooperativity_of_setup() {
        let p = CqedParams::rb87_setup();
        assert_relative_eq!(p.kappa(), 2.7, epsilon = 1e-15);
        // 4.9² / (2 · 2.7 · 3.03)
        assert_relative_eq!(p.cooperativity(), 24.01 / 16.362, epsilon = 1e-14);
        assert_relative_eq!(p.escape_efficiency(), 2.4 / 2.7, epsilon = 1e-15);
    }

    #[test]
    fn cooperativity_is_unit_free() {
        // Applying 2π to every rate must not change C.
        let p = CqedParams::rb87_setup();
        let tau = std::f64::consts::TAU;
        let q = CqedParams::new(p.g * tau, p.kappa_c * tau, p.kappa_l * tau, p.gamma * tau).unwrap();
        assert_relative_eq!(p.cooperativity(), q.cooperativity(), max_relative = 1e-14);
    }

    #[test]
    fn rejects_non_positive_rates() {
        assert!(CqedParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(CqedParams::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(CqedParams::new(1.0, 1.0, 1.0, f64::NAN).is_err());
        assert!(CqedParams::new(1.0, 1.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn lossless_cavity_escapes_everything() {
        let p = CqedParams::new(4.9, 2.4, 0.0, 3.03).unwrap();
        assert_eq!(p.escape_efficiency(), 1.0);
    }
}
