use homodyne_modes::*;
use num_complex::Complex64;
use proptest::prelude::*;
use pulse_shaper::TemporalMode;

fn mode_from(parts: &[(f64, f64)]) -> Option<TemporalMode> {
    let samples: Vec<Complex64> = parts.iter().map(|&(r, i)| Complex64::new(r, i)).collect();
    TemporalMode::normalized(-1.0, 0.1, samples).ok()
}

fn arb_mode() -> impl Strategy<Value = TemporalMode> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 16..40).prop_filter_map("non-zero mode", |p| mode_from(&p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_covariance_recovers_injected_numbers(mode in arb_mode(), p1 in 0.05..1.0f64) {
        let span = ModeSpan::of(&mode);
        let grid = Grid::of(&mode);
        let dec = decompose(&Correlation::exact(grid, span.covariance(p1)), &Correlation::vacuum(grid)).unwrap();
        let n = dec.photon_numbers();
        let injected = span.photon_numbers(p1);
        prop_assert!((n[0] - injected[0]).abs() < 1e-9);
        prop_assert!((n[1] - injected[1]).abs() < 1e-9);
        prop_assert!((dec.excess_trace() - 2.0 * p1).abs() < 1e-9);
        prop_assert!(dec.orthonormality_residual() < 1e-9);
        prop_assert!(dec.eigenvalues.iter().all(|k| *k >= 0.0));
        prop_assert!(dec.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn reconstruction_is_normalized_and_matches(mode in arb_mode(), p1 in 0.05..1.0f64) {
        let grid = Grid::of(&mode);
        let dec = decompose(&Correlation::exact(grid, ModeSpan::of(&mode).covariance(p1)), &Correlation::vacuum(grid)).unwrap();
        let rec = reconstruct_mode(&dec, &ReconstructOptions::default()).unwrap();
        prop_assert!((rec.mode.norm() - 1.0).abs() < 1e-9);
        let best = rec.branches().iter().map(|b| pulse_shaper::mode_fidelity(&mode, b).unwrap()).fold(0.0, f64::max);
        prop_assert!(best > 1.0 - 1e-8, "fidelity {}", best);
    }

    #[test]
    fn budget_is_a_product_in_unit_interval(effs in prop::collection::vec(0.0..=1.0f64, 0..10)) {
        let stages: Vec<Stage> = effs.iter().enumerate().map(|(i, &e)| Stage::new(&format!("s{i}"), e, 0.01)).collect();
        let b = loss_budget(&stages).unwrap();
        prop_assert!((0.0..=1.0).contains(&b.total));
        prop_assert!((b.total - effs.iter().product::<f64>()).abs() < 1e-15);
        prop_assert!(b.cumulative.windows(2).all(|w| w[1] <= w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn synthesis_is_reproducible_per_seed(mode in arb_mode(), seed in any::<u64>(), p1 in 0.0..=1.0f64) {
        let opts = SynthOptions { p1, trials: 150, seed, generator: Generator::Gaussian };
        let a = synth_records(&mode, &Grid::of(&mode), &opts).unwrap();
        let b = synth_records(&mode, &Grid::of(&mode), &opts).unwrap();
        prop_assert_eq!(&a, &b);
        let other = synth_records(&mode, &Grid::of(&mode), &SynthOptions { seed: seed.wrapping_add(1), ..opts }).unwrap();
        prop_assert_ne!(a, other);
    }
}
