use serde::{Deserialize, Serialize};

use crate::{HomodyneError, Result};

/// One element of an efficiency chain. `uncertainty` is an absolute standard
/// error, zero when unknown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub efficiency: f64,
    #[serde(default)]
    pub uncertainty: f64,
}

impl Stage {
    pub fn new(name: &str, efficiency: f64, uncertainty: f64) -> Self {
        Self { name: name.into(), efficiency, uncertainty }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossBudget {
    pub stages: Vec<Stage>,
    /// Running product after each stage.
    pub cumulative: Vec<f64>,
    pub total: f64,
    /// Relative errors added in quadrature, times the total.
    pub uncertainty: f64,
}

pub fn loss_budget(stages: &[Stage]) -> Result<LossBudget> {
    let mut total = 1.0;
    let mut rel2 = 0.0;
    let mut cumulative = Vec::with_capacity(stages.len());
    for s in stages {
        if !(0.0..=1.0).contains(&s.efficiency) {
            return Err(HomodyneError::OutOfRange { stage: s.name.clone(), value: s.efficiency });
        }
        if !(s.uncertainty >= 0.0 && s.uncertainty.is_finite()) {
            return Err(HomodyneError::InvalidInput(format!("uncertainty of '{}' must be non-negative", s.name)));
        }
        total *= s.efficiency;
        if s.efficiency > 0.0 {
            rel2 += (s.uncertainty / s.efficiency).powi(2);
        }
        cumulative.push(total);
    }
    Ok(LossBudget { stages: stages.to_vec(), cumulative, total, uncertainty: total * rel2.sqrt() })
}

/// The loss chain of the single-atom homodyne setup.
pub fn setup_chain() -> Vec<Stage> {
    vec![
        Stage::new("atom preparation", 0.74, 0.05),
        Stage::new("photon production", 0.66, 0.0),
        Stage::new("fiber coupling", 0.90, 0.01),
        Stage::new("isolator", 0.970, 0.005),
        Stage::new("local-oscillator mode matching", 0.88, 0.01),
        Stage::new("photodiode", 0.89, 0.05),
        Stage::new("electronic noise", 0.98, 0.0),
        Stage::new("optical components", 0.90, 0.01),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_chain_is_lossless() {
        let b = loss_budget(&[]).unwrap();
        assert_eq!(b.total, 1.0);
        assert_eq!(b.uncertainty, 0.0);
    }

    #[test]
    fn single_stage_passes_through() {
        assert_eq!(loss_budget(&[Stage::new("x", 0.5, 0.0)]).unwrap().total, 0.5);
    }

    #[test]
    fn relative_errors_add_in_quadrature() {
        let b = loss_budget(&[Stage::new("a", 0.5, 0.05), Stage::new("b", 0.8, 0.08)]).unwrap();
        assert!((b.total - 0.4).abs() < 1e-15);
        assert!((b.uncertainty - 0.4 * 0.02f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_stage_is_named() {
        let err = loss_budget(&[Stage::new("ok", 0.9, 0.0), Stage::new("bad", 1.2, 0.0)]).unwrap_err();
        assert!(matches!(err, HomodyneError::OutOfRange { ref stage, .. } if stage == "bad"));
    }
}
