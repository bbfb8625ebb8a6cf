mod common;

use approx::assert_abs_diff_eq;
use common::{best_branch_fidelity, chirped_sech};
use homodyne_modes::*;
use num_complex::Complex64;
use pulse_shaper::TemporalMode;

fn synth(mode: &TemporalMode, p1: f64, trials: usize, seed: u64, generator: Generator) -> QuadratureRecords {
    synth_records(mode, &Grid::of(mode), &SynthOptions { p1, trials, seed, generator }).unwrap()
}

fn analyse(records: &QuadratureRecords) -> ModeDecomposition {
    let corr = autocorrelation(records, false).unwrap();
    decompose(&corr, &Correlation::vacuum(records.grid())).unwrap()
}

fn real_sech(n: usize) -> TemporalMode {
    chirped_sech(n, 0.0)
}

#[test]
fn exact_covariance_recovers_photon_numbers_and_functions() {
    let mode = chirped_sech(32, 2.2);
    let span = ModeSpan::of(&mode);
    let p1 = 0.53;
    let dec = decompose(&Correlation::exact(Grid::of(&mode), span.covariance(p1)), &Correlation::vacuum(Grid::of(&mode))).unwrap();
    let n = dec.photon_numbers();
    let injected = span.photon_numbers(p1);
    assert_abs_diff_eq!(n[0], injected[0], epsilon = 1e-9);
    assert_abs_diff_eq!(n[1], injected[1], epsilon = 1e-9);
    assert!(n[2..].iter().all(|x| x.abs() < 1e-9));
    for k in 0..2 {
        let f = span.function(k);
        let dot: f64 = f.iter().zip(&dec.eigenfunctions[k]).map(|(a, b)| a * b).sum::<f64>() * mode.dt();
        assert_abs_diff_eq!(dot.abs(), 1.0, epsilon = 1e-9);
    }
    assert!(dec.orthonormality_residual() < 1e-9);

    let rec = reconstruct_mode(&dec, &ReconstructOptions::default()).unwrap();
    assert_eq!(rec.significant, 2);
    assert!(best_branch_fidelity(&mode, &rec.branches()) > 1.0 - 1e-9);
}

#[test]
fn real_mode_gives_one_eigenvalue_of_two_n_plus_one() {
    let mode = real_sech(24);
    let trials = 40_000;
    let dec = analyse(&synth(&mode, 0.3, trials, 1, Generator::Gaussian));
    assert_abs_diff_eq!(dec.eigenvalues[0], 1.6, epsilon = 5.0 * 1.6 * (2.0 / trials as f64).sqrt());
    let rec = reconstruct_mode(&dec, &ReconstructOptions::default()).unwrap();
    assert_eq!(rec.significant, 1);
    assert!(rec.mode.samples().iter().all(|s| s.im == 0.0));
    assert!(pulse_shaper::mode_fidelity(&mode, &rec.mode).unwrap() > 0.99);
}

#[test]
fn chirped_mode_gives_two_eigenvalues_summing_to_p1() {
    let mode = chirped_sech(24, 2.2);
    let trials = 40_000;
    let p1 = 0.6;
    let dec = analyse(&synth(&mode, p1, trials, 2, Generator::Gaussian));
    let rec = reconstruct_mode(&dec, &ReconstructOptions::default()).unwrap();
    assert_eq!(rec.significant, 2);
    assert_abs_diff_eq!(rec.total_photons(), p1, epsilon = 0.05);
    assert!(best_branch_fidelity(&mode, &rec.branches()) > 0.98);
}

#[test]
fn sample_correlation_converges_to_the_exact_covariance() {
    let mode = chirped_sech(16, 1.0);
    let trials = 50_000;
    let corr = autocorrelation(&synth(&mode, 0.5, trials, 3, Generator::Gaussian), false).unwrap();
    let exact = ModeSpan::of(&mode).covariance(0.5);
    let worst = (&corr.matrix - &exact).amax();
    assert!(worst < 5.0 / (trials as f64).sqrt(), "max deviation {worst}");
}

#[test]
fn trace_sum_rule() {
    let mode = chirped_sech(24, 2.2);
    let trials = 20_000;
    let p1 = 0.4;
    let dec = analyse(&synth(&mode, p1, trials, 4, Generator::Gaussian));
    // Var(trace) ≈ 2·n_bins/trials for near-unit covariance.
    let sigma = (2.0 * 24.0 / trials as f64).sqrt();
    assert_abs_diff_eq!(dec.excess_trace(), 2.0 * p1, epsilon = 5.0 * sigma);
}

#[test]
fn vacuum_spectrum_stays_inside_the_noise_band() {
    let mode = real_sech(32);
    let trials = 10_000;
    let dec = analyse(&synth(&mode, 0.0, trials, 5, Generator::Gaussian));
    let c = 32.0 / trials as f64;
    let (lo, hi) = ((1.0 - c.sqrt()).powi(2), (1.0 + c.sqrt()).powi(2));
    let slack = 5.0 / (trials as f64).sqrt();
    assert!(dec.eigenvalues.iter().all(|k| *k > lo - slack && *k < hi + slack), "{:?}", dec.eigenvalues);
    assert!(matches!(reconstruct_mode(&dec, &ReconstructOptions::default()), Err(HomodyneError::NoSignal)));
}

#[test]
fn median_fidelity_improves_with_trials() {
    let mode = chirped_sech(24, 2.2);
    let median = |trials: usize| {
        let mut f: Vec<f64> = (0..20)
            .map(|seed| {
                let dec = analyse(&synth(&mode, 0.6, trials, 100 + seed, Generator::Gaussian));
                reconstruct_mode(&dec, &ReconstructOptions::default()).map_or(0.0, |r| best_branch_fidelity(&mode, &r.branches()))
            })
            .collect();
        f.sort_by(f64::total_cmp);
        0.5 * (f[9] + f[10])
    };
    let m: Vec<f64> = [1_000, 10_000, 100_000].into_iter().map(median).collect();
    assert!(m[0] < m[1] && m[1] < m[2], "{m:?}");
    assert!(m[2] > 0.99);
}

#[test]
fn vacuum_records_fit_to_vacuum() {
    let mode = chirped_sech(24, 2.2);
    let stats = photon_stats_in_mode(&synth(&mode, 0.0, 20_000, 6, Generator::FockMixture), &mode, &FitOptions::default()).unwrap();
    assert_abs_diff_eq!(stats.p0(), 1.0, epsilon = 0.01);
}

#[test]
fn photon_statistics_round_trip() {
    let mode = chirped_sech(24, 2.2);
    let records = synth(&mode, 0.284, 50_000, 7, Generator::FockMixture);
    let stats = photon_stats_in_mode(&records, &mode, &FitOptions::default()).unwrap();
    assert_abs_diff_eq!(stats.p1(), 0.284, epsilon = 0.02);
    assert!(stats.p2() < 0.02);
    assert_abs_diff_eq!(stats.probabilities.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
    assert!(stats.uncertainties[1] > 0.0 && stats.uncertainties[1] < 0.02, "{stats:?}");
}

#[test]
fn photon_statistics_ignore_grid_refinement() {
    let coarse = chirped_sech(24, 2.2);
    let fine = chirped_sech(96, 2.2);
    let fit = |m: &TemporalMode| photon_stats_in_mode(&synth(m, 0.3, 20_000, 8, Generator::FockMixture), m, &FitOptions::default()).unwrap();
    let (a, b) = (fit(&coarse), fit(&fine));
    for k in 0..3 {
        assert_abs_diff_eq!(a.probabilities[k], b.probabilities[k], epsilon = 0.01);
    }
}

#[test]
fn mixture_generator_has_the_gaussian_second_moments() {
    let mode = chirped_sech(16, 1.5);
    let trials = 50_000;
    let corr = autocorrelation(&synth(&mode, 0.7, trials, 9, Generator::FockMixture), false).unwrap();
    let worst = (&corr.matrix - ModeSpan::of(&mode).covariance(0.7)).amax();
    assert!(worst < 5.0 / (trials as f64).sqrt(), "max deviation {worst}");
}

#[test]
fn records_and_reports_round_trip_through_files() {
    let dir = std::env::temp_dir().join(format!("homodyne-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mode = chirped_sech(16, 1.0);
    let records = synth(&mode, 0.5, 200, 10, Generator::Gaussian);
    let path = dir.join("records.csv");
    write_records(&path, &records).unwrap();
    assert_eq!(read_records(&path).unwrap(), records);

    let dec = decompose(&Correlation::exact(Grid::of(&mode), ModeSpan::of(&mode).covariance(0.5)), &Correlation::vacuum(Grid::of(&mode))).unwrap();
    let json: serde_json::Value = serde_json::from_str(&export::decomposition_json(&dec, 2).unwrap()).unwrap();
    assert_eq!(json["eigenvalues"].as_array().unwrap().len(), 16);
    assert_eq!(json["eigenfunctions"].as_array().unwrap().len(), 2);
    let rec = reconstruct_mode(&dec, &ReconstructOptions::default()).unwrap();
    let json: serde_json::Value = serde_json::from_str(&export::reconstruction_json(&rec).unwrap()).unwrap();
    let re: Vec<f64> = serde_json::from_value(json["re"].clone()).unwrap();
    let im: Vec<f64> = serde_json::from_value(json["im"].clone()).unwrap();
    let back: Vec<Complex64> = re.iter().zip(&im).map(|(r, i)| Complex64::new(*r, *i)).collect();
    assert_eq!(back, rec.mode.samples());
    assert_eq!(export::reconstruction_csv(&rec).lines().count(), 17);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn setup_chain_budget() {
    let b = loss_budget(&setup_chain()).unwrap();
    assert_abs_diff_eq!(b.total, 0.2945, epsilon = 5e-4);
    assert!(b.uncertainty > 0.02 && b.uncertainty < 0.05);
    assert_eq!(b.cumulative.len(), 8);
}
