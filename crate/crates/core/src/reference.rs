//! Atomic reference data (quantum numbers and excited-state hyperfine
//! offsets), loaded from a TOML file. The bundled `data/rb87_d2.toml` is the
//! default.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::angular::HalfInt;
use crate::{CoreError, Result};

const BUNDLED_RB87_D2: &str = include_str!("../data/rb87_d2.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceData {
    pub atom: AtomSection,
    pub ground: GroundSection,
    pub excited: ExcitedSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSection {
    pub name: String,
    pub nuclear_spin: f64,
    pub ground_j: f64,
    pub excited_j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundSection {
    pub manifolds: Vec<i32>,
    pub cavity_f: i32,
    pub cavity_m: i32,
    pub storage_f: i32,
    pub storage_m: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitedSection {
    pub manifolds: Vec<i32>,
    pub lambda_m: i32,
    /// Offsets in MHz from the first listed manifold, keyed `F<n>`.
    pub offsets_mhz: BTreeMap<String, f64>,
}

impl ReferenceData {
    /// The bundled 87Rb D2 data.
    pub fn rb87_d2() -> Self {
        Self::from_toml_str(BUNDLED_RB87_D2).expect("bundled reference data is valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let data: Self = toml::from_str(text).map_err(|e| CoreError::Configuration(e.to_string()))?;
        data.validate()?;
        Ok(data)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CoreError::Configuration(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    fn validate(&self) -> Result<()> {
        for v in [self.atom.nuclear_spin, self.atom.ground_j, self.atom.excited_j] {
            HalfInt::from_f64(v)?;
        }
        if self.excited.manifolds.len() != 3 {
            return Err(CoreError::Configuration(format!(
                "expected three excited manifolds for the Λ scheme, found {}",
                self.excited.manifolds.len()
            )));
        }
        let offsets = self.excited_offsets()?;
        if offsets[0] != 0.0 {
            return Err(CoreError::Configuration("offset of the first excited manifold must be 0".into()));
        }
        if !offsets.windows(2).all(|w| w[1] > w[0]) {
            return Err(CoreError::Configuration(format!("excited offsets {offsets:?} must increase strictly with F'")));
        }
        for f in [self.ground.cavity_f, self.ground.storage_f] {
            if !self.ground.manifolds.contains(&f) {
                return Err(CoreError::Configuration(format!("ground manifold F={f} is not listed")));
            }
        }
        Ok(())
    }

    /// Hyperfine offsets (MHz) of the three excited manifolds, in the order of
    /// `excited.manifolds`.
    pub fn excited_offsets(&self) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for (slot, f) in out.iter_mut().zip(&self.excited.manifolds) {
            *slot = *self
                .excited
                .offsets_mhz
                .get(&format!("F{f}"))
                .ok_or_else(|| CoreError::Configuration(format!("missing hyperfine offset for F'={f}")))?;
        }
        Ok(out)
    }

    pub fn nuclear_spin(&self) -> HalfInt {
        HalfInt::from_f64(self.atom.nuclear_spin).expect("validated")
    }

    pub fn ground_j(&self) -> HalfInt {
        HalfInt::from_f64(self.atom.ground_j).expect("validated")
    }

    pub fn excited_j(&self) -> HalfInt {
        HalfInt::from_f64(self.atom.excited_j).expect("validated")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_offsets() {
        let r = ReferenceData::rb87_d2();
        let off = r.excited_offsets().unwrap();
        assert_eq!(off, [0.0, 156.947, 423.597]);
    }

    #[test]
    fn missing_offset_is_configuration_error() {
        let text = BUNDLED_RB87_D2.replace("F3 = 423.597", "");
        let err = ReferenceData::from_toml_str(&text).unwrap_err();
        assert!(matches!(err, CoreError::Configuration(ref m) if m.contains("F'=3")), "{err}");
    }

    #[test]
    fn non_increasing_offsets_rejected() {
        let text = BUNDLED_RB87_D2.replace("F3 = 423.597", "F3 = 100.0");
        assert!(ReferenceData::from_toml_str(&text).is_err());
    }
}
