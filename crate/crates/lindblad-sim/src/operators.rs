use cqed_core::units::angular;
use cqed_core::{CqedParams, LevelScheme};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::space::{AtomLevel, HilbertSpaceSpec, Polarization, PHOTON_CONFIGS};
use crate::{Result, SimError};

const HERMITICITY_TOLERANCE: f64 = 1e-12;

/// Sparse complex matrix in coordinate form. Duplicate coordinates add up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorMatrix {
    pub dim: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    pub fn push(&mut self, row: usize, col: usize, value: Complex64) {
        if value != Complex64::new(0.0, 0.0) {
            self.entries.push((row, col, value));
        }
    }

    /// Sums duplicate coordinates and drops zeros; entries end up sorted by
    /// (row, column).
    pub fn compact(&self) -> Self {
        let mut map = std::collections::BTreeMap::new();
        for &(i, j, v) in &self.entries {
            *map.entry((i, j)).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        let mut out = Self::zeros(self.dim);
        for ((i, j), v) in map {
            out.push(i, j, v);
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let mut m = vec![vec![Complex64::new(0.0, 0.0); self.dim]; self.dim];
        for &(i, j, v) in &self.entries {
            m[i][j] += v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|&(i, j, v)| (j, i, v.conj())).collect() }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = Self::zeros(self.dim);
        for &(i, j, v) in &self.entries {
            out.push(i, j, v * s);
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Self { dim: self.dim, entries }
    }

    /// O†O.
    pub fn gram(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for &(i, j, a) in &self.entries {
            for &(k, l, b) in &self.entries {
                if i == k {
                    out.push(j, l, a.conj() * b);
                }
            }
        }
        out
    }

    /// max |O − O†| over all elements.
    pub fn hermiticity_residual(&self) -> f64 {
        let m = self.to_dense();
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((m[i][j] - m[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Restriction to the states `keep` (new index = position in `keep`).
    /// Every entry whose column lies in `keep` must have its row there too;
    /// with `both_ways` the same is required with rows and columns swapped.
    pub fn restrict(&self, keep: &[usize], both_ways: bool) -> Result<Self> {
        let mut map = vec![usize::MAX; self.dim];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut out = Self::zeros(keep.len());
        for &(i, j, v) in &self.entries {
            match (map[i], map[j]) {
                (MAX, MAX) => {}
                (a, b) if a != MAX && b != MAX => out.push(a, b, v),
                (MAX, _) => return Err(SimError::SectorNotClosed(format!("element ({i}, {j}) maps the sector outward"))),
                (_, MAX) if both_ways => return Err(SimError::SectorNotClosed(format!("element ({i}, {j}) feeds the sector from outside"))),
                _ => {}
            }
        }
        Ok(out)
    }
}

const MAX: usize = usize::MAX;

/// Couplings present in the Hamiltonian, counted once per atomic transition
/// (not per photon configuration).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingCounts {
    /// π transitions F=2 ↔ F' allowed by angular-momentum addition.
    pub control_structural: usize,
    pub control_nonzero: usize,
    /// σ transitions F=1 ↔ F' (per polarization) allowed by angular-momentum addition.
    pub cavity_structural: usize,
    pub cavity_nonzero: usize,
}

/// H(t) = h0 + Ω(t)·v + Ω*(t)·v†, with Ω in rad/µs, on the simulated sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParts {
    pub h0: OperatorMatrix,
    pub v: OperatorMatrix,
    pub counts: CouplingCounts,
}

impl HamiltonianParts {
    pub fn at(&self, omega_rad: Complex64) -> OperatorMatrix {
        self.h0.plus(&self.v.scaled(omega_rad)).plus(&self.v.adjoint().scaled(omega_rad.conj()))
    }
}

/// Builds the Hamiltonian on the full basis and restricts it to the sector.
///
/// Conventions: excited energies +Δ_i, control element ⟨e|H|s⟩ = −c·Ω/2,
/// cavity element ⟨e, n_p−1|H|g, n_p⟩ = −c·g, two-photon resonance.
pub fn hamiltonian_parts(space: &HilbertSpaceSpec, params: &CqedParams, scheme: &LevelScheme) -> Result<HamiltonianParts> {
    let n = space.full_dim();
    let detunings = scheme.detunings();
    let table = &scheme.coupling;
    let g = angular(params.g);
    let mut h0 = OperatorMatrix::zeros(n);
    let mut v = OperatorMatrix::zeros(n);
    let mut counts = CouplingCounts { control_structural: 0, control_nonzero: 0, cavity_structural: 0, cavity_nonzero: 0 };

    for (a, atom) in space.atomic_levels.iter().enumerate() {
        let Some(slot) = space.manifold(*atom) else { continue };
        for p in 0..PHOTON_CONFIGS {
            h0.push(a * PHOTON_CONFIGS + p, a * PHOTON_CONFIGS + p, Complex64::new(angular(detunings[slot]), 0.0));
        }

        // Control, π: |F=2, m⟩ ↔ |F', m⟩.
        if atom.m.abs() <= 2 {
            counts.control_structural += 1;
            let c = if scheme.variant.control_active(slot) { table.coefficient(atom.f, atom.m, 2, atom.m) } else { 0.0 };
            if c != 0.0 {
                counts.control_nonzero += 1;
                let s = space.atomic_index(AtomLevel::ground(2, atom.m)).expect("F=2 level");
                for p in 0..PHOTON_CONFIGS {
                    v.push(a * PHOTON_CONFIGS + p, s * PHOTON_CONFIGS + p, Complex64::new(-0.5 * c, 0.0));
                }
            }
        }

        // Cavity: |F=1, m, 1_p⟩ ↔ |F', m + q_p, 0_p⟩.
        for pol in Polarization::BOTH {
            let m = atom.m - pol.q();
            if m.abs() > 1 || (atom.f - 1).abs() > 1 {
                continue;
            }
            counts.cavity_structural += 1;
            let c = if scheme.variant.cavity_active(slot) { table.coefficient(atom.f, atom.m, 1, m) } else { 0.0 };
            if c == 0.0 {
                continue;
            }
            counts.cavity_nonzero += 1;
            let gi = space.atomic_index(AtomLevel::ground(1, m)).expect("F=1 level");
            let bit = 1 << pol.index();
            for p in (0..PHOTON_CONFIGS).filter(|p| p & bit == 0) {
                let e = a * PHOTON_CONFIGS + p;
                let gs = gi * PHOTON_CONFIGS + (p | bit);
                h0.push(e, gs, Complex64::new(-c * g, 0.0));
                h0.push(gs, e, Complex64::new(-c * g, 0.0));
            }
        }
    }

    let residual = h0.hermiticity_residual();
    if residual > HERMITICITY_TOLERANCE {
        return Err(SimError::NotHermitian(residual));
    }
    Ok(HamiltonianParts { h0: h0.restrict(&space.sector, true)?, v: v.restrict(&space.sector, true)?, counts })
}

/// H at one drive value Ω (linear MHz), Hermiticity checked.
pub fn build_hamiltonian(space: &HilbertSpaceSpec, omega: Complex64, params: &CqedParams, scheme: &LevelScheme) -> Result<OperatorMatrix> {
    let h = hamiltonian_parts(space, params, scheme)?.at(omega * angular(1.0));
    let residual = h.hermiticity_residual();
    if residual > HERMITICITY_TOLERANCE {
        return Err(SimError::NotHermitian(residual));
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapseTarget {
    /// The jumped state stays in the simulated sector.
    Internal,
    /// The photon leaves through the output mirror.
    OutCoupled(Polarization),
    /// The photon is lost inside the cavity or through the back mirror.
    Lost(Polarization),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseOp {
    pub label: String,
    pub op: OperatorMatrix,
    pub target: CollapseTarget,
}

/// Spontaneous emission per dipole channel, √(2γ)·c |g⟩⟨e|, and cavity decay
/// per mode, √(2κ_c) a_p and √(2κ_l) a_p, restricted to the sector.
pub fn build_collapse_ops(space: &HilbertSpaceSpec, params: &CqedParams, scheme: &LevelScheme) -> Result<Vec<CollapseOp>> {
    let n = space.full_dim();
    let mut ops = Vec::new();
    let rate = (2.0 * angular(params.gamma)).sqrt();

    for atom in space.atomic_levels.iter().filter(|a| a.excited) {
        let branching = scheme.coupling.branching_sum(atom.f, atom.m);
        if (branching - 1.0).abs() > 1e-12 {
            return Err(SimError::Branching(atom.label(), branching));
        }
        for ch in scheme.coupling.decay.iter().filter(|c| c.f_excited == atom.f && c.m_excited == atom.m) {
            let e = space.atomic_index(*atom).expect("excited level");
            let gi = space.atomic_index(AtomLevel::ground(ch.f_ground, ch.m_ground)).expect("ground level");
            let mut op = OperatorMatrix::zeros(n);
            for p in 0..PHOTON_CONFIGS {
                op.push(gi * PHOTON_CONFIGS + p, e * PHOTON_CONFIGS + p, Complex64::new(rate * ch.coefficient, 0.0));
            }
            let label = format!("{} -> {}", atom.label(), AtomLevel::ground(ch.f_ground, ch.m_ground).label());
            ops.push(CollapseOp { label, op: op.restrict(&space.sector, false)?, target: CollapseTarget::Internal });
        }
    }

    for pol in Polarization::BOTH {
        let bit = 1 << pol.index();
        let mut a = OperatorMatrix::zeros(n);
        for atom in 0..space.atomic_levels.len() {
            for p in (0..PHOTON_CONFIGS).filter(|p| p & bit != 0) {
                a.push(atom * PHOTON_CONFIGS + (p & !bit), atom * PHOTON_CONFIGS + p, Complex64::new(1.0, 0.0));
            }
        }
        let a = a.restrict(&space.sector, false)?;
        for (rate, target, kind) in [(params.kappa_c, CollapseTarget::OutCoupled(pol), "out"), (params.kappa_l, CollapseTarget::Lost(pol), "lost")] {
            let s = Complex64::new((2.0 * angular(rate)).sqrt(), 0.0);
            ops.push(CollapseOp { label: format!("cavity {} {kind}", pol.name()), op: a.scaled(s), target });
        }
    }
    Ok(ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::build_space;
    use cqed_core::{build_scheme, ModelVariant, ReferenceData};

    fn setup(variant: ModelVariant) -> (HilbertSpaceSpec, CqedParams, LevelScheme) {
        let p = CqedParams::rb87_setup();
        let s = build_scheme(&p, -20.0, variant, &ReferenceData::rb87_d2()).unwrap();
        (build_space(&s), p, s)
    }

    #[test]
    fn coupling_counts() {
        let (space, p, s) = setup(ModelVariant::ThreeLevel);
        let c = hamiltonian_parts(&space, &p, &s).unwrap().counts;
        assert_eq!(c.control_structural, 13);
        assert_eq!(c.cavity_structural, 10);
        assert_eq!(c.cavity_nonzero, 10);
        // F=2,m=0 ↔ F'=2,m=0 vanishes for π light.
        assert_eq!(c.control_nonzero, 12);
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let (space, p, s) = setup(ModelVariant::ThreeLevel);
        let h = build_hamiltonian(&space, Complex64::new(12.0, -7.0), &p, &s).unwrap();
        assert!(h.hermiticity_residual() < 1e-12);
    }

    #[test]
    fn drive_matrix_matches_scheme_coefficients() {
        let (space, p, s) = setup(ModelVariant::ThreeLevel);
        let parts = hamiltonian_parts(&space, &p, &s).unwrap();
        let v = parts.v.to_dense();
        let st = space.storage_state();
        for (i, &fe) in s.excited_f.iter().enumerate() {
            let e = space.index_of(AtomLevel::excited(fe, -1), 0).unwrap();
            assert_eq!(v[e][st].re, -0.5 * s.coupling.c_s[i]);
        }
        let h0 = parts.h0.to_dense();
        let sig = space.signal_state();
        for (i, &fe) in s.excited_f.iter().enumerate() {
            let e = space.index_of(AtomLevel::excited(fe, -1), 0).unwrap();
            assert!((h0[e][sig].re + s.coupling.c_g[i] * angular(p.g)).abs() < 1e-12);
        }
    }

    #[test]
    fn excited_decay_rates_sum_to_two_gamma() {
        let (space, p, s) = setup(ModelVariant::ThreeLevel);
        let ops = build_collapse_ops(&space, &p, &s).unwrap();
        for i in (0..space.dim()).filter(|&i| space.state(i).atom.excited) {
            let total: f64 = ops
                .iter()
                .filter(|c| c.target == CollapseTarget::Internal)
                .flat_map(|c| c.op.entries.iter())
                .filter(|e| e.1 == i)
                .map(|e| e.2.norm_sqr())
                .sum();
            assert!((total - 2.0 * angular(p.gamma)).abs() < 1e-9, "{}", space.state(i).label());
        }
    }

    #[test]
    fn f3_decays_only_to_f2() {
        let (space, p, s) = setup(ModelVariant::ThreeLevel);
        for c in build_collapse_ops(&space, &p, &s).unwrap() {
            for &(row, col, _) in &c.op.entries {
                if space.state(col).atom.excited && space.state(col).atom.f == 3 {
                    assert_eq!(space.state(row).atom.f, 2);
                }
            }
        }
    }
}
