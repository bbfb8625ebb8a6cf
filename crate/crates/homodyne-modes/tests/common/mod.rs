use num_complex::Complex64;
use pulse_shaper::TemporalMode;

/// sech(t/T) on n midpoint bins of [−hw, hw], with the light-shift phase
/// chirp·ln R(t), R the energy still to come.
pub fn chirped_sech(n: usize, chirp: f64) -> TemporalMode {
    let (t_half, hw) = (0.5, 2.0);
    let dt = 2.0 * hw / n as f64;
    let amp: Vec<f64> = (0..n).map(|j| 1.0 / ((-hw + (j as f64 + 0.5) * dt) / t_half).cosh()).collect();
    let total: f64 = amp.iter().map(|a| a * a).sum();
    let mut after = total;
    let samples = amp
        .iter()
        .map(|a| {
            after -= a * a;
            let r = (after + 0.5 * a * a) / total;
            Complex64::from_polar(*a, chirp * r.ln())
        })
        .collect();
    TemporalMode::normalized(-hw + 0.5 * dt, dt, samples).unwrap()
}

pub fn best_branch_fidelity(target: &TemporalMode, branches: &[TemporalMode; 2]) -> f64 {
    branches.iter().map(|b| pulse_shaper::mode_fidelity(target, b).unwrap()).fold(0.0, f64::max)
}
