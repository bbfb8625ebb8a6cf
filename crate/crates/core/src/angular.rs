//! Wigner 3-j and 6-j symbols by Racah's factorial sums, and the normalized
//! hyperfine dipole coefficients built from them.

use serde::{Deserialize, Serialize};

use crate::{CoreError, Result};

/// A non-negative or negative half-integer, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    pub const fn int(v: i32) -> Self {
        Self(2 * v)
    }

    pub fn from_f64(v: f64) -> Result<Self> {
        let twice = 2.0 * v;
        if !twice.is_finite() || (twice - twice.round()).abs() > 1e-9 {
            return Err(CoreError::InvalidQuantumNumber(v));
        }
        Ok(Self(twice.round() as i32))
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

const MAX_FACTORIAL: usize = 64;

fn factorial(n: i32) -> f64 {
    static TABLE: std::sync::OnceLock<[f64; MAX_FACTORIAL + 1]> = std::sync::OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = [1.0; MAX_FACTORIAL + 1];
        for i in 1..=MAX_FACTORIAL {
            t[i] = t[i - 1] * i as f64;
        }
        t
    });
    debug_assert!(n >= 0);
    table[n as usize]
}

fn sign(exponent: i32) -> f64 {
    if exponent.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Halves a doubled quantity that must be an integer.
fn half(twice: i32) -> Option<i32> {
    (twice % 2 == 0).then_some(twice / 2)
}

/// Triangle coefficient Δ(abc); `None` when the triangle rule fails.
fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> Option<f64> {
    let (a, b, c) = (a.0, b.0, c.0);
    let x = half(a + b - c)?;
    let y = half(a - b + c)?;
    let z = half(-a + b + c)?;
    let s = half(a + b + c)?;
    if x < 0 || y < 0 || z < 0 {
        return None;
    }
    Some(factorial(x) * factorial(y) * factorial(z) / factorial(s + 1))
}

/// Wigner 3-j symbol (j1 j2 j3; m1 m2 m3). Returns exactly 0 whenever a
/// selection rule (projection sum, triangle, |m| ≤ j, integrality) fails.
pub fn wigner_3j(j: [HalfInt; 3], m: [HalfInt; 3]) -> f64 {
    let [j1, j2, j3] = j.map(HalfInt::twice);
    let [m1, m2, m3] = m.map(HalfInt::twice);
    if m1 + m2 + m3 != 0 {
        return 0.0;
    }
    for (jj, mm) in [(j1, m1), (j2, m2), (j3, m3)] {
        if jj < 0 || mm.abs() > jj || (jj + mm) % 2 != 0 {
            return 0.0;
        }
    }
    let Some(delta) = triangle(j[0], j[1], j[2]) else {
        return 0.0;
    };
    // All of these are integers once the checks above pass.
    let h = |x: i32| x / 2;
    let prefactor_sq = factorial(h(j1 + m1))
        * factorial(h(j1 - m1))
        * factorial(h(j2 + m2))
        * factorial(h(j2 - m2))
        * factorial(h(j3 + m3))
        * factorial(h(j3 - m3));
    let a = h(j3 - j2 + m1);
    let b = h(j3 - j1 - m2);
    let c = h(j1 + j2 - j3);
    let d = h(j1 - m1);
    let e = h(j2 + m2);
    let k_min = 0.max(-a).max(-b);
    let k_max = c.min(d).min(e);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let denom = factorial(k) * factorial(a + k) * factorial(b + k) * factorial(c - k) * factorial(d - k) * factorial(e - k);
        sum += sign(k) / denom;
    }
    sign(h(j1 - j2 - m3)) * (delta * prefactor_sq).sqrt() * sum
}

/// Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}; zero if any triad violates the
/// triangle rule.
pub fn wigner_6j(j: [HalfInt; 6]) -> f64 {
    let [j1, j2, j3, j4, j5, j6] = j;
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    let mut deltas = [0.0; 4];
    for (slot, (a, b, c)) in deltas.iter_mut().zip(triads) {
        match triangle(a, b, c) {
            Some(d) => *slot = d,
            None => return 0.0,
        }
    }
    let t = |a: HalfInt, b: HalfInt, c: HalfInt| (a.0 + b.0 + c.0) / 2;
    let sums = triads.map(|(a, b, c)| t(a, b, c));
    let p = [(j1.0 + j2.0 + j4.0 + j5.0) / 2, (j2.0 + j3.0 + j5.0 + j6.0) / 2, (j3.0 + j1.0 + j6.0 + j4.0) / 2];
    let t_min = *sums.iter().max().unwrap();
    let t_max = *p.iter().min().unwrap();
    let mut sum = 0.0;
    for tt in t_min..=t_max {
        let mut denom = 1.0;
        for s in sums {
            denom *= factorial(tt - s);
        }
        for q in p {
            denom *= factorial(q - tt);
        }
        sum += sign(tt) * factorial(tt + 1) / denom;
    }
    deltas.iter().product::<f64>().sqrt() * sum
}

/// One electric-dipole transition between hyperfine Zeeman states
/// |(J I) F m⟩ (ground) and |(J' I) F' m'⟩ (excited).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleTransition {
    pub nuclear_spin: HalfInt,
    pub j_ground: HalfInt,
    pub j_excited: HalfInt,
    pub f_ground: HalfInt,
    pub m_ground: HalfInt,
    pub f_excited: HalfInt,
    pub m_excited: HalfInt,
}

/// Signed dipole coefficient ⟨F m| d_q |F' m'⟩ with q = m − m', normalized so
/// that the squares over every ground state reachable from a fixed excited
/// state sum to one (the spontaneous-decay branching ratios).
///
/// Phases follow the Wigner–Eckart convention
/// (−1)^(F'−1+m) √(2F+1) (F' 1 F; m' q −m) · (−1)^(F'+J+1+I) √((2F'+1)(2J+1)) {J J' 1; F' F I},
/// divided by √((2J+1)/(2J'+1)). Products c_g·c_s of two coefficients sharing
/// an excited state are independent of the excited-state phase choice.
pub fn wigner_coupling(t: &DipoleTransition) -> f64 {
    let one = HalfInt::int(1);
    let q = HalfInt(t.m_ground.0 - t.m_excited.0);
    if q.0.abs() > 2 {
        return 0.0;
    }
    let three_j = wigner_3j([t.f_excited, one, t.f_ground], [t.m_excited, q, HalfInt(-t.m_ground.0)]);
    if three_j == 0.0 {
        return 0.0;
    }
    let six_j = wigner_6j([t.j_ground, t.j_excited, one, t.f_excited, t.f_ground, t.nuclear_spin]);
    let (jg, je, f, fe, i) = (t.j_ground.0, t.j_excited.0, t.f_ground.0, t.f_excited.0, t.nuclear_spin.0);
    let phase = sign((fe - 2 + t.m_ground.0) / 2) * sign((fe + jg + 2 + i) / 2);
    let reduced = ((fe + 1) as f64 * (jg + 1) as f64).sqrt() * six_j;
    let norm = ((jg + 1) as f64 / (je + 1) as f64).sqrt();
    phase * ((f + 1) as f64).sqrt() * three_j * reduced / norm
}

/// Convenience wrapper with plain numbers: `dipole_coefficient(I, J, J', F, m, F', m')`.
pub fn dipole_coefficient(
    nuclear_spin: f64,
    j_ground: f64,
    j_excited: f64,
    f_ground: f64,
    m_ground: f64,
    f_excited: f64,
    m_excited: f64,
) -> Result<f64> {
    Ok(wigner_coupling(&DipoleTransition {
        nuclear_spin: HalfInt::from_f64(nuclear_spin)?,
        j_ground: HalfInt::from_f64(j_ground)?,
        j_excited: HalfInt::from_f64(j_excited)?,
        f_ground: HalfInt::from_f64(f_ground)?,
        m_ground: HalfInt::from_f64(m_ground)?,
        f_excited: HalfInt::from_f64(f_excited)?,
        m_excited: HalfInt::from_f64(m_excited)?,
    }))
}
