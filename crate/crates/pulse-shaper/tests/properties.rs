use cqed_core::{adiabatic_coeffs, build_scheme, CqedParams, ModelVariant, ReferenceData};
use num_complex::Complex64;
use proptest::prelude::*;
use pulse_shaper::{emission_control, make_shape, spin_wave, storage_control, time_reverse, PulseOptions, ShapeSpec, TemporalMode};

fn family() -> impl Strategy<Value = ShapeSpec> {
    (0.05f64..5.0, 0usize..3, 64usize..600, proptest::option::of((-0.5f64..0.5, -6.0f64..6.0))).prop_map(|(t, kind, n, jump)| {
        let spec = match kind {
            0 => ShapeSpec::sech(t, 10.0, n),
            1 => ShapeSpec::gaussian(t, 8.0, n),
            _ => ShapeSpec::square(t, n),
        };
        match jump {
            Some((frac, phi)) => {
                let (lo, hi) = spec.window;
                spec.with_phase_jump(lo + (frac + 0.5) * (hi - lo), phi)
            }
            None => spec,
        }
    })
}

fn random_mode() -> impl Strategy<Value = TemporalMode> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16..200)
        .prop_filter("non-zero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| TemporalMode::normalized(-0.3, 0.01, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

fn coeffs(delta: f64) -> cqed_core::AdiabaticCoeffs {
    let p = CqedParams::rb87_setup();
    adiabatic_coeffs(&p, &build_scheme(&p, delta, ModelVariant::ThreeLevel, &ReferenceData::rb87_d2()).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn shapes_are_normalized(spec in family()) {
        let m = make_shape(&spec).unwrap();
        prop_assert!((m.norm() - 1.0).abs() < 1e-9);
        prop_assert!((time_reverse(&m).norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn duality_holds_for_any_mode(m in random_mode(), delta in -100.0f64..100.0, eps in 0.0f64..1e-2, wmax in 1.0f64..500.0) {
        let c = coeffs(delta);
        let opts = PulseOptions { compensate_phase: true, omega_max: wmax, tail_epsilon: eps };
        let st = storage_control(&m, &c, &opts).unwrap();
        let em = emission_control(&time_reverse(&m), &c, &opts).unwrap();
        let n = st.len();
        for j in 0..n {
            prop_assert_eq!(st.omega[j], em.omega[n - 1 - j].conj());
        }
    }

    #[test]
    fn pulse_invariants(spec in family(), delta in -100.0f64..100.0, wmax in 1.0f64..500.0, compensate in any::<bool>()) {
        let m = make_shape(&spec).unwrap();
        let opts = PulseOptions { compensate_phase: compensate, omega_max: wmax, tail_epsilon: 1e-4 };
        for p in [emission_control(&m, &coeffs(delta), &opts).unwrap(), storage_control(&m, &coeffs(delta), &opts).unwrap()] {
            prop_assert!(p.h.windows(2).all(|w| w[1] >= w[0]));
            prop_assert!(p.max_abs_omega() <= wmax * (1.0 + 1e-12));
        }
    }

    #[test]
    fn smaller_tail_epsilon_never_captures_less(spec in family(), delta in -60.0f64..60.0, e1 in 1e-8f64..1e-1, e2 in 1e-8f64..1e-1) {
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        let p = CqedParams::rb87_setup();
        let c = coeffs(delta);
        let m = make_shape(&spec).unwrap();
        let emitted = |eps: f64| {
            let pulse = emission_control(&m, &c, &PulseOptions { tail_epsilon: eps, ..Default::default() }).unwrap();
            spin_wave(&pulse, &c, &p).unwrap().emitted_probability()
        };
        prop_assert!(emitted(lo) >= emitted(hi));
    }
}
