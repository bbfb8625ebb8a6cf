//! Basis of the atom-cavity system.
//!
//! Full basis index: `4·a + p`, where `a` is the atomic index and `p` the
//! photon configuration (0 empty, 1 one σ⁺ photon, 2 one σ⁻ photon, 3 one of
//! each). Atomic order: F=1 m=−1..1, F=2 m=−2..2, F'=1 m=−1..1,
//! F'=2 m=−2..2, F'=3 m=−2..2.
//!
//! Simulated sector, in this order: F=2 ⊗ empty (5), F' ⊗ empty (13),
//! F=1 ⊗ empty (3), F=1 ⊗ σ⁺ (3), F=1 ⊗ σ⁻ (3).

use serde::{Deserialize, Serialize};

use cqed_core::LevelScheme;

pub const ATOMIC_DIM: usize = 21;
pub const PHOTON_CONFIGS: usize = 4;
pub const FULL_DIM: usize = ATOMIC_DIM * PHOTON_CONFIGS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AtomLevel {
    pub excited: bool,
    pub f: i32,
    pub m: i32,
}

impl AtomLevel {
    pub fn ground(f: i32, m: i32) -> Self {
        Self { excited: false, f, m }
    }

    pub fn excited(f: i32, m: i32) -> Self {
        Self { excited: true, f, m }
    }

    pub fn label(&self) -> String {
        let prime = if self.excited { "'" } else { "" };
        format!("F{prime}={},m={}", self.f, self.m)
    }
}

/// Cavity polarization modes; the index is the mode's slot in per-mode arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    SigmaPlus = 0,
    SigmaMinus = 1,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Self::SigmaPlus, Self::SigmaMinus];

    /// Angular momentum carried by the photon, Δm on absorption.
    pub fn q(self) -> i32 {
        match self {
            Self::SigmaPlus => 1,
            Self::SigmaMinus => -1,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    fn bit(self) -> usize {
        1 << self.index()
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::SigmaPlus => "sigma_plus",
            Self::SigmaMinus => "sigma_minus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisState {
    pub atom: AtomLevel,
    /// Photon configuration bitmask (bit 0 σ⁺, bit 1 σ⁻).
    pub photons: usize,
}

impl BasisState {
    pub fn has(&self, p: Polarization) -> bool {
        self.photons & p.bit() != 0
    }

    pub fn photon_count(&self) -> u32 {
        self.photons.count_ones()
    }

    pub fn label(&self) -> String {
        let photons = match self.photons {
            0 => "0",
            1 => "s+",
            2 => "s-",
            _ => "s+s-",
        };
        format!("{}|{photons}", self.atom.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertSpaceSpec {
    pub atomic_levels: Vec<AtomLevel>,
    /// F' quantum number of each excited manifold, in scheme order.
    pub excited_f: [i32; 3],
    /// Full-basis indices of the simulated sector, in sector order.
    pub sector: Vec<usize>,
}

impl HilbertSpaceSpec {
    pub fn full_dim(&self) -> usize {
        self.atomic_levels.len() * PHOTON_CONFIGS
    }

    pub fn dim(&self) -> usize {
        self.sector.len()
    }

    pub fn ground_count(&self) -> usize {
        self.atomic_levels.iter().filter(|a| !a.excited).count()
    }

    pub fn excited_count(&self) -> usize {
        self.atomic_levels.iter().filter(|a| a.excited).count()
    }

    pub fn full_state(&self, index: usize) -> BasisState {
        BasisState { atom: self.atomic_levels[index / PHOTON_CONFIGS], photons: index % PHOTON_CONFIGS }
    }

    pub fn full_index(&self, atom: AtomLevel, photons: usize) -> Option<usize> {
        self.atomic_levels.iter().position(|a| *a == atom).map(|a| a * PHOTON_CONFIGS + photons)
    }

    pub fn atomic_index(&self, atom: AtomLevel) -> Option<usize> {
        self.atomic_levels.iter().position(|a| *a == atom)
    }

    /// Sector state number `i`.
    pub fn state(&self, i: usize) -> BasisState {
        self.full_state(self.sector[i])
    }

    /// Position of a state in the sector.
    pub fn index_of(&self, atom: AtomLevel, photons: usize) -> Option<usize> {
        let full = self.full_index(atom, photons)?;
        self.sector.iter().position(|&s| s == full)
    }

    /// Sector index of the storage state |F=2, m=−1⟩ with an empty cavity.
    pub fn storage_state(&self) -> usize {
        self.index_of(AtomLevel::ground(2, -1), 0).expect("storage state in sector")
    }

    /// Sector index of |F=1, m=0⟩ with one σ⁻ photon, the target of the
    /// Raman transition.
    pub fn signal_state(&self) -> usize {
        self.index_of(AtomLevel::ground(1, 0), Polarization::SigmaMinus.bit()).expect("signal state in sector")
    }

    /// Excited manifold slot (0..3) of an excited level.
    pub fn manifold(&self, atom: AtomLevel) -> Option<usize> {
        atom.excited.then(|| self.excited_f.iter().position(|&f| f == atom.f)).flatten()
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.dim()).map(|i| self.state(i).label()).collect()
    }
}

pub fn build_space(scheme: &LevelScheme) -> HilbertSpaceSpec {
    let mut atomic_levels = Vec::with_capacity(ATOMIC_DIM);
    for f in [1, 2] {
        atomic_levels.extend((-f..=f).map(|m| AtomLevel::ground(f, m)));
    }
    // Excited states reachable from F=2 by π light; F'=3, m=±3 never couples.
    for f in scheme.excited_f {
        let top = f.min(2);
        atomic_levels.extend((-top..=top).map(|m| AtomLevel::excited(f, m)));
    }
    let mut space = HilbertSpaceSpec { atomic_levels, excited_f: scheme.excited_f, sector: Vec::new() };

    let idx = |s: &HilbertSpaceSpec, a: AtomLevel, p: usize| s.full_index(a, p).expect("level in basis");
    let mut sector = Vec::new();
    sector.extend((-2..=2).map(|m| idx(&space, AtomLevel::ground(2, m), 0)));
    for f in scheme.excited_f {
        let top = f.min(2);
        sector.extend((-top..=top).map(|m| idx(&space, AtomLevel::excited(f, m), 0)));
    }
    for p in [0, 1, 2] {
        sector.extend((-1..=1).map(|m| idx(&space, AtomLevel::ground(1, m), p)));
    }
    space.sector = sector;
    space
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let s = build_space(&LevelScheme::ideal_lambda(0.0));
        assert_eq!(s.atomic_levels.len(), ATOMIC_DIM);
        assert_eq!(s.full_dim(), FULL_DIM);
        assert_eq!(s.excited_count(), 13);
        assert_eq!(s.ground_count(), 8);
        assert_eq!(s.dim(), 27);
        assert!(s.sector.iter().all(|&i| s.full_state(i).photon_count() <= 1));
    }

    #[test]
    fn named_states() {
        let s = build_space(&LevelScheme::ideal_lambda(0.0));
        assert_eq!(s.state(s.storage_state()).label(), "F=2,m=-1|0");
        assert_eq!(s.state(s.signal_state()).label(), "F=1,m=0|s-");
    }
}
