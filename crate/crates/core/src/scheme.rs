use serde::{Deserialize, Serialize};

use crate::angular::{wigner_coupling, DipoleTransition, HalfInt};
use crate::params::CqedParams;
use crate::reference::ReferenceData;
use crate::{CoreError, Result};

/// Two-photon detuning δ between the cavity and control fields. The model is
/// always evaluated on two-photon resonance.
pub const TWO_PHOTON_DETUNING: f64 = 0.0;

/// How many excited manifolds take part in the Raman process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelVariant {
    /// F'=1 only.
    OneLevel,
    /// F'=1 and F'=2.
    TwoLevel,
    /// F'=1, 2 and 3 (F'=3 couples only to the control field).
    ThreeLevel,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 3] = [Self::OneLevel, Self::TwoLevel, Self::ThreeLevel];

    pub fn name(self) -> &'static str {
        match self {
            Self::OneLevel => "one_level",
            Self::TwoLevel => "two_level",
            Self::ThreeLevel => "three_level",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }

    /// Whether the control field addresses excited manifold `i` (0-based).
    pub fn control_active(self, i: usize) -> bool {
        match self {
            Self::OneLevel => i == 0,
            Self::TwoLevel => i <= 1,
            Self::ThreeLevel => i <= 2,
        }
    }

    /// Whether the cavity field addresses excited manifold `i` (0-based).
    pub fn cavity_active(self, i: usize) -> bool {
        match self {
            Self::OneLevel => i == 0,
            Self::TwoLevel | Self::ThreeLevel => i <= 1,
        }
    }
}

/// One spontaneous-decay channel |F' m'⟩ → |F m⟩ with its signed, normalized
/// dipole coefficient (the branching ratio is its square).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayChannel {
    pub f_excited: i32,
    pub m_excited: i32,
    pub f_ground: i32,
    pub m_ground: i32,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingTable {
    /// Cavity transition |F=1,0⟩ ↔ |F'_i, −1⟩, per excited manifold.
    pub c_g: [f64; 3],
    /// Control transition |F=2,−1⟩ ↔ |F'_i, −1⟩, per excited manifold.
    pub c_s: [f64; 3],
    /// Every excited → ground dipole channel with a non-zero coefficient.
    pub decay: Vec<DecayChannel>,
}

impl CouplingTable {
    /// Sum of squared branching coefficients out of |F' m'⟩.
    pub fn branching_sum(&self, f_excited: i32, m_excited: i32) -> f64 {
        self.decay
            .iter()
            .filter(|c| c.f_excited == f_excited && c.m_excited == m_excited)
            .map(|c| c.coefficient * c.coefficient)
            .sum()
    }

    /// Looks up the coefficient of |F' m'⟩ → |F m⟩ (zero if absent).
    pub fn coefficient(&self, f_excited: i32, m_excited: i32, f_ground: i32, m_ground: i32) -> f64 {
        self.decay
            .iter()
            .find(|c| c.f_excited == f_excited && c.m_excited == m_excited && c.f_ground == f_ground && c.m_ground == m_ground)
            .map_or(0.0, |c| c.coefficient)
    }
}

/// Excited-level structure at a given single-photon detuning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelScheme {
    pub variant: ModelVariant,
    /// Single-photon detuning Δ relative to F'=1, MHz.
    pub delta: f64,
    /// Hyperfine offsets of the three excited manifolds from F'=1, MHz.
    pub hyperfine_offsets: [f64; 3],
    /// F' quantum numbers of the three manifolds.
    pub excited_f: [i32; 3],
    /// Coefficients with the variant mask already applied.
    pub coupling: CouplingTable,
}

impl LevelScheme {
    /// Per-manifold detunings Δ_i = Δ − offset_i, MHz.
    pub fn detunings(&self) -> [f64; 3] {
        self.hyperfine_offsets.map(|o| self.delta - o)
    }

    /// Same scheme at another detuning.
    pub fn with_delta(&self, delta: f64) -> Self {
        Self { delta, ..self.clone() }
    }

    /// A bare Λ-system with unit coupling coefficients and a single excited
    /// level. It has no Zeeman structure, so it cannot drive the full
    /// master-equation simulation.
    pub fn ideal_lambda(delta: f64) -> Self {
        Self {
            variant: ModelVariant::OneLevel,
            delta,
            hyperfine_offsets: [0.0; 3],
            excited_f: [1, 2, 3],
            coupling: CouplingTable { c_g: [1.0, 0.0, 0.0], c_s: [1.0, 0.0, 0.0], decay: Vec::new() },
        }
    }
}

/// Builds the level scheme for `variant` at detuning `delta` (MHz), with
/// coupling coefficients from the dipole matrix elements of `reference`.
pub fn build_scheme(params: &CqedParams, delta: f64, variant: ModelVariant, reference: &ReferenceData) -> Result<LevelScheme> {
    params.validate()?;
    if !delta.is_finite() {
        return Err(CoreError::InvalidParams(format!("detuning {delta} is not finite")));
    }
    let offsets = reference.excited_offsets()?;
    let excited_f: [i32; 3] = reference
        .excited
        .manifolds
        .clone()
        .try_into()
        .map_err(|_| CoreError::Configuration("expected three excited manifolds".into()))?;

    let transition = |f: i32, m: i32, fe: i32, me: i32| DipoleTransition {
        nuclear_spin: reference.nuclear_spin(),
        j_ground: reference.ground_j(),
        j_excited: reference.excited_j(),
        f_ground: HalfInt::int(f),
        m_ground: HalfInt::int(m),
        f_excited: HalfInt::int(fe),
        m_excited: HalfInt::int(me),
    };

    let g = &reference.ground;
    let me = reference.excited.lambda_m;
    let mut c_g = [0.0; 3];
    let mut c_s = [0.0; 3];
    for (i, &fe) in excited_f.iter().enumerate() {
        if variant.cavity_active(i) {
            c_g[i] = wigner_coupling(&transition(g.cavity_f, g.cavity_m, fe, me));
        }
        if variant.control_active(i) {
            c_s[i] = wigner_coupling(&transition(g.storage_f, g.storage_m, fe, me));
        }
    }

    let mut decay = Vec::new();
    for &fe in &excited_f {
        for m_e in -fe..=fe {
            for &f in &g.manifolds {
                for m in (m_e - 1).max(-f)..=(m_e + 1).min(f) {
                    let c = wigner_coupling(&transition(f, m, fe, m_e));
                    if c != 0.0 {
                        decay.push(DecayChannel { f_excited: fe, m_excited: m_e, f_ground: f, m_ground: m, coefficient: c });
                    }
                }
            }
        }
    }

    Ok(LevelScheme { variant, delta, hyperfine_offsets: offsets, excited_f, coupling: CouplingTable { c_g, c_s, decay } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn scheme(delta: f64, variant: ModelVariant) -> LevelScheme {
        build_scheme(&CqedParams::rb87_setup(), delta, variant, &ReferenceData::rb87_d2()).unwrap()
    }

    #[test]
    fn one_level_mask() {
        let s = scheme(-20.0, ModelVariant::OneLevel);
        assert_eq!(s.coupling.c_s[1], 0.0);
        assert_eq!(s.coupling.c_s[2], 0.0);
        assert_eq!(s.coupling.c_g[1], 0.0);
        assert!(s.coupling.c_s[0] != 0.0 && s.coupling.c_g[0] != 0.0);
    }

    #[test]
    fn two_level_mask() {
        let s = scheme(-20.0, ModelVariant::TwoLevel);
        assert_eq!(s.coupling.c_s[2], 0.0);
        assert!(s.coupling.c_s[1] != 0.0);
    }

    #[test]
    fn zero_detuning_offsets() {
        let s = scheme(0.0, ModelVariant::ThreeLevel);
        let d = s.detunings();
        assert_eq!(d[0], 0.0);
        assert_eq!(d[1], -156.947);
    }

    #[test]
    fn three_level_detunings_strictly_decrease() {
        let d = scheme(-20.0, ModelVariant::ThreeLevel).detunings();
        assert_eq!(d[0], -20.0);
        assert_abs_diff_eq!(d[1], -176.947, epsilon = 1e-12);
        assert_abs_diff_eq!(d[2], -443.597, epsilon = 1e-12);
        assert!(d[0] > d[1] && d[1] > d[2]);
    }

    #[test]
    fn lambda_coefficients_are_exact_rationals() {
        // Frozen from an independent symbolic evaluation of the same matrix elements.
        let s = scheme(0.0, ModelVariant::ThreeLevel);
        let c = &s.coupling;
        assert_abs_diff_eq!(c.c_g[0], -(5.0f64 / 12.0).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(c.c_g[1], 0.5, epsilon = 1e-14);
        assert_eq!(c.c_g[2], 0.0);
        assert_abs_diff_eq!(c.c_s[0], (1.0f64 / 20.0).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(c.c_s[1], -(1.0f64 / 12.0).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(c.c_s[2], -(8.0f64 / 15.0).sqrt(), epsilon = 1e-14);
        for v in c.c_g.iter().chain(&c.c_s) {
            assert!(v.abs() <= 1.0);
        }
    }

    #[test]
    fn branching_is_complete_for_every_excited_state() {
        let s = scheme(0.0, ModelVariant::ThreeLevel);
        for fe in s.excited_f {
            for me in -fe..=fe {
                assert_abs_diff_eq!(s.coupling.branching_sum(fe, me), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn f3_never_decays_to_f1() {
        let s = scheme(0.0, ModelVariant::ThreeLevel);
        assert!(s.coupling.decay.iter().filter(|c| c.f_excited == 3).all(|c| c.f_ground == 2));
    }
}
