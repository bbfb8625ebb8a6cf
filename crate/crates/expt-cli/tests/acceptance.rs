//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line
//! straight to stderr (bypassing the harness capture) and then asserts.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::time::Instant;

use cqed_core::{emission_efficiency, CqedParams, ModelVariant};
use expt_cli::commands::convert::run_convert;
use expt_cli::commands::homodyne::run_homodyne;
use expt_cli::commands::select::run_select;
use expt_cli::commands::sweep::run_sweep;
use expt_cli::config::{ExperimentConfig, Variant};
use expt_cli::units::Frequency;
use homodyne_modes::{loss_budget, setup_chain, source_brightness};
use lindblad_sim::{build_space, emission_experiment, evolve, step_bound, Drive, EmissionOptions, Polarization, SimConfig};
use pulse_shaper::{make_shape, PulseOptions, ShapeSpec};
use rayon::prelude::*;

fn report(id: &str, pass: bool, detail: String) {
    let line = format!("criterion {id}: {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {id} failed: {detail}");
}

fn info(id: &str, detail: String) {
    let _ = std::io::stderr().write_all(format!("criterion {id} (info): {detail}\n").as_bytes());
}

fn sim_options() -> EmissionOptions {
    EmissionOptions { pulse: PulseOptions { omega_max: 200.0, ..Default::default() }, ..Default::default() }
}

#[test]
fn criterion_01_ideal_efficiency_anchor() {
    let p = CqedParams::rb87_setup();
    let eta = p.ideal_output_efficiency();
    // Hand route: C = g²/(2κγ) with κ = κ_c + κ_l.
    let c = 4.9f64.powi(2) / (2.0 * 2.7 * 3.03);
    let by_hand = 2.4 / 2.7 * (2.0 * c) / (2.0 * c + 1.0);
    let pass = (eta - 0.663).abs() <= 0.005 && (eta - by_hand).abs() < 1e-12;
    report("1", pass, format!("eta = {eta:.5} (by hand {by_hand:.5}, expected 0.663 +- 0.005)"));
}

#[test]
fn criterion_02_loss_budget() {
    let b = loss_budget(&setup_chain()).unwrap();
    let by_hand = 0.74 * 0.66 * 0.90 * 0.970 * 0.88 * 0.89 * 0.98 * 0.90;
    let pass = (b.total - 0.295).abs() <= 0.010 && (b.total - by_hand).abs() < 1e-12;
    report("2", pass, format!("total = {:.4} +- {:.4} (expected 0.295 +- 0.010)", b.total, b.uncertainty));
}

#[test]
fn criterion_03_brightness_inference() {
    let p = source_brightness(0.284, 0.6, 0.74).unwrap();
    report("3", (p - 0.64).abs() <= 0.01, format!("p1 = {p:.4} (expected 0.64 +- 0.01)"));
}

#[test]
fn criterion_04_analytic_and_master_equation_agree() {
    let started = Instant::now();
    let params = CqedParams::rb87_setup();
    let cases: Vec<(f64, f64)> = [0.3, 0.5, 1.0].iter().flat_map(|&t| [-40.0, -20.0, -10.0, 10.0].map(|d| (t, d))).collect();
    let rows: Vec<(f64, f64, f64, f64, f64)> = cases
        .par_iter()
        .map(|&(t, delta)| {
            let cfg = ExperimentConfig::default();
            let scheme = cfg.scheme(Variant::Model(ModelVariant::ThreeLevel), delta).unwrap();
            let target = make_shape(&ShapeSpec::sech(t, 6.0, 1200)).unwrap();
            let r = emission_experiment(&params, &scheme, &target, &sim_options()).unwrap();
            let eta = emission_efficiency(&params, &scheme).unwrap().value;
            (t, delta, r.coherent_efficiency, eta, r.fidelity)
        })
        .collect();
    let worst_gap = rows.iter().map(|r| (r.2 / r.3 - 1.0).abs()).fold(0.0, f64::max);
    let worst_fid = rows.iter().map(|r| r.4).fold(1.0, f64::min);
    let secs = started.elapsed().as_secs_f64();
    let pass = worst_gap <= 0.05 && worst_fid >= 0.98 && secs <= 300.0;
    report("4", pass, format!("{} runs, max relative gap {worst_gap:.2e}, min fidelity {worst_fid:.4}, {secs:.0} s", rows.len()));
}

#[test]
fn criterion_05_phase_compensation() {
    let started = Instant::now();
    let mut cfg = ExperimentConfig::default();
    cfg.model.detuning = Frequency(-20.0);
    cfg.homodyne.photon_stats = false;
    let on = run_homodyne(&cfg, true).unwrap().summary;
    let off = run_homodyne(&cfg, false).unwrap().summary;
    let f_on = on.fidelity_target.unwrap_or(0.0);
    let f_off = off.fidelity_target.unwrap_or(0.0);
    let restored = off.fidelity_restored.unwrap_or(0.0);
    let secs = started.elapsed().as_secs_f64();
    let pass = f_on >= 0.95 && f_off < f_on - 0.1 && restored >= 0.95 && secs <= 120.0;
    report("5", pass, format!("compensated {f_on:.4}, uncompensated {f_off:.4}, restored {restored:.4}, {secs:.1} s"));
}

#[test]
fn criterion_06_selectivity() {
    let r = run_select(&ExperimentConfig::default()).unwrap();
    let fit = &r.input_fit;
    let phase_err = (fit.phi0 - FRAC_PI_2).abs();
    let ratio = fit.offset / fit.amplitude;
    let shift_err = (r.fitted_shift - PI).abs();
    let pass = phase_err <= 0.05 && ratio <= 0.02 && r.efficiency_at_pi < 1e-12 && shift_err <= 0.05 && r.shift_residual < 1e-9;
    report(
        "6",
        pass,
        format!(
            "phi0 = {:.4}, B/A = {ratio:.1e}, eta(pi) = {:.1e}, control shift = {:.4} rad (residual {:.1e})",
            fit.phi0, r.efficiency_at_pi, r.fitted_shift, r.shift_residual
        ),
    );
}

#[test]
fn criterion_07_reshaping() {
    let mut cfg = ExperimentConfig::default();
    cfg.convert.validate = true;
    let started = Instant::now();
    let r = run_convert(&cfg).unwrap();
    let secs = started.elapsed().as_secs_f64();
    let product = r.eta_store * r.eta_retrieve;
    let gap = (r.total / product - 1.0).abs();
    let v = r.validation.as_ref().expect("validation requested");
    let pass = gap <= 0.02 && r.relative_gap <= 0.02 && (r.total - 0.43).abs() <= 0.02 && v.relative_gap <= 0.05 && secs <= 600.0;
    report(
        "7",
        pass,
        format!(
            "total = {:.4} (product {product:.4}, closed form {:.4}), stretch x{} deviation {:.1e}, master-equation check {:.4} vs {:.4} in {secs:.0} s",
            r.total, r.closed_form_product, r.stretch.ratio, r.stretch.max_relative_deviation, v.coherent_efficiency, v.analytic_efficiency
        ),
    );
}

#[test]
fn criterion_08a_vacuum_spectrum() {
    let mut cfg = ExperimentConfig::default();
    cfg.homodyne.p1 = Some(0.0);
    cfg.homodyne.trials = 10_000;
    cfg.homodyne.photon_stats = false;
    let r = run_homodyne(&cfg, true).unwrap();
    let ev = &r.decomposition.eigenvalues;
    let n = cfg.homodyne.trials as f64;
    let band = 5.0 / n.sqrt();
    let worst = ev.iter().map(|k| (k - 1.0).abs()).fold(0.0, f64::max);
    // Sample-covariance spectrum of white noise: Marchenko-Pastur edges.
    let c = cfg.homodyne.n_bins as f64 / n;
    let (lo, hi) = ((1.0 - c.sqrt()).powi(2), (1.0 + c.sqrt()).powi(2));
    let slack = 5.0 / n.sqrt();
    let inside = ev.iter().all(|k| *k >= lo - slack && *k <= hi + slack);
    info(
        "8a",
        format!("status {}, all {} eigenvalues inside Marchenko-Pastur band [{lo:.3}, {hi:.3}] +- {slack:.3}: {inside}", r.summary.status, ev.len()),
    );
    report("8a", worst <= band, format!("max |kappa - 1| = {worst:.4} vs 5/sqrt(N) = {band:.4} at N = {n}"));
}

#[test]
fn criterion_08b_photon_statistics_round_trip() {
    let started = Instant::now();
    let mut cfg = ExperimentConfig::default();
    cfg.homodyne.p1 = Some(0.284);
    cfg.homodyne.stats_trials = 100_000;
    let s = run_homodyne(&cfg, true).unwrap().summary;
    let stats = s.photon_stats.expect("photon statistics");
    let secs = started.elapsed().as_secs_f64();
    let pass = (stats.p1() - 0.284).abs() <= 0.02 && secs <= 300.0;
    report("8b", pass, format!("p1 = {:.4} +- {:.4} (injected 0.284, {} trials, {secs:.1} s)", stats.p1(), stats.uncertainties[1], stats.trials));
}

#[test]
fn criterion_08c_chirped_mode_reconstruction() {
    let mut cfg = ExperimentConfig::default();
    cfg.homodyne.trials = 20_000;
    cfg.homodyne.photon_stats = false;
    let s = run_homodyne(&cfg, false).unwrap().summary;
    let f = s.fidelity_injected.unwrap_or(0.0);
    report("8c", f >= 0.95, format!("fidelity {f:.4} with the chirped mode at {} trials (chirp {:.3})", s.trials, s.chirp_coefficient));
}

#[test]
fn criterion_09_conservation() {
    let started = Instant::now();
    let cfg = ExperimentConfig::default();
    let params = CqedParams::rb87_setup();
    let scheme = cfg.scheme(Variant::Model(ModelVariant::ThreeLevel), -20.0).unwrap();
    let space = build_space(&scheme);

    let target = make_shape(&ShapeSpec::sech(0.5, 6.0, 1200)).unwrap();
    let shaped = emission_experiment(&params, &scheme, &target, &sim_options()).unwrap();
    let res = &shaped.result;
    let trace = res.trace.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max);
    let books = (0..res.len())
        .map(|j| {
            let atoms: f64 = res.atomic_populations[j].iter().sum();
            let sinks: f64 = (0..2).map(|k| res.out_coupled[k][j] + res.lost[k][j]).sum();
            (atoms + sinks - 1.0).abs()
        })
        .fold(0.0, f64::max);

    let bare = CqedParams { g: 0.0, ..params };
    let mut photon = SimConfig::new(0.0, 0.01, 201, Drive::none());
    photon.initial = Some(space.signal_state());
    let r = evolve(&space, &bare, &scheme, &photon).unwrap();
    let k = Polarization::SigmaMinus.index();
    let ratio = r.out_coupled[k].last().unwrap() / r.lost[k].last().unwrap();
    let ratio_err = (ratio / (params.kappa_c / params.kappa_l) - 1.0).abs();

    let short = make_shape(&ShapeSpec::sech(0.3, 6.0, 600)).unwrap();
    let pulse = pulse_shaper::emission_control(&short, &cqed_core::adiabatic_coeffs(&params, &scheme).unwrap(), &sim_options().pulse).unwrap();
    let bound = step_bound(&params, &scheme, &Drive::from_pulse(&pulse));
    let halving: Vec<f64> = [0.99, 0.495]
        .par_iter()
        .map(|f| {
            let mut c = SimConfig::for_pulse(&pulse, 200);
            c.step = Some(f * bound);
            evolve(&space, &params, &scheme, &c).unwrap().efficiency(Polarization::SigmaMinus)
        })
        .collect();
    let step_change = (halving[0] - halving[1]).abs();
    let secs = started.elapsed().as_secs_f64();

    let pass = trace <= 1e-6 && books <= 1e-6 && ratio_err <= 1e-6 && step_change < 1e-4 && secs <= 120.0;
    report(
        "9",
        pass,
        format!("trace {trace:.1e}, bookkeeping {books:.1e}, out:lost {ratio:.4} (rel err {ratio_err:.1e}), step halving {step_change:.1e}, {secs:.1} s"),
    );
}

#[test]
fn criterion_10_interference_minimum() {
    let started = Instant::now();
    let mut cfg = ExperimentConfig::default();
    cfg.sweep.variants = vec![Variant::Model(ModelVariant::TwoLevel)];
    cfg.sweep.lindblad_variant = Variant::Model(ModelVariant::TwoLevel);
    cfg.sweep.lindblad_checks = [63.0, 68.0, 73.0, 78.0, 83.0, 88.0, 93.0].map(Frequency).to_vec();
    let r = run_sweep(&cfg).unwrap();
    let check = r.lindblad.expect("spot checks requested");
    let analytic = check.analytic_minimum.expect("minimum between the F'=1 and F'=2 resonances");
    let lindblad = check.lindblad_minimum.expect("spot-check vertex");
    let sep = check.separation_mhz.unwrap_or(f64::INFINITY);
    let secs = started.elapsed().as_secs_f64();
    let pass = sep <= 5.0 && secs <= 300.0;
    report(
        "10",
        pass,
        format!("analytic minimum {:.2} MHz, master-equation vertex {:.2} MHz, separation {sep:.2} MHz, {secs:.0} s", analytic.0, lindblad.0),
    );
}
