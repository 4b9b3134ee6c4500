use std::f64::consts::{FRAC_PI_2, PI};

use epr_core::detector::{coincidence_count, mc_estimate, poisson_stream, CoincidenceWindow, EventStream, RngSeed};
use epr_core::experiments::{
    brendel_rate, clauser_aspect, detection_order_invariance, franson, ghz_skew_sweep, linear_grid, Crosstalk,
    ExperimentPreset, SkewMode,
};
use epr_core::{AnalyzerSettings, SpreadSpec};
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn presets() -> Vec<ExperimentPreset> {
    vec![
        ExperimentPreset::clauser_aspect(),
        ExperimentPreset::ghz(Crosstalk::On),
        ExperimentPreset::ghz(Crosstalk::Off),
        ExperimentPreset::franson(0.4, -1.3),
        ExperimentPreset::ghosh_mandel(2.0, 0.5),
        ExperimentPreset::brendel(3.0, 1.0, 0.04).unwrap(),
    ]
}

fn settings_for(p: &ExperimentPreset, angles: &[f64]) -> AnalyzerSettings {
    AnalyzerSettings(angles[..p.network.analyzer_count()].to_vec())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

proptest! {
    #[test]
    fn engine_matches_brute_force_oracle(angles in prop::array::uniform4(-2.0 * PI..2.0 * PI)) {
        for p in presets() {
            let set = settings_for(&p, &angles);
            let engine = p.rate(&set).unwrap().raw;
            let oracle = p.oracle_rate(&set).unwrap();
            prop_assert!(engine >= 0.0);
            prop_assert!((engine - oracle).abs() < TOL, "{:?}: {} vs {}", p.id, engine, oracle);
        }
    }

    #[test]
    fn clauser_normalized_values_are_complementary(delta in -4.0..4.0f64, base in -4.0..4.0f64) {
        let a = clauser_aspect(base, base + delta).unwrap().value;
        let b = clauser_aspect(base, base + delta + FRAC_PI_2).unwrap().value;
        prop_assert!((a + b - 1.0).abs() < TOL);
    }
}

#[test]
fn clauser_rate_depends_only_on_angle_difference() {
    let grid: Vec<f64> = (0..19).map(|i| i as f64 * PI / 18.0).collect();
    for &t1 in &grid {
        for &t2 in &grid {
            let r = clauser_aspect(t1, t2).unwrap().raw;
            let shifted = clauser_aspect(0.0, t2 - t1).unwrap().raw;
            assert!((r - shifted).abs() < TOL);
            assert!((r - 0.25 * (t1 - t2).sin().powi(2)).abs() < TOL);
        }
    }
}

#[test]
fn every_detector_order_gives_the_same_rate() {
    let angles = [0.3, -1.1, 2.4, 0.9];
    for p in presets() {
        let set = settings_for(&p, &angles);
        for order in permutations(p.detector_count()) {
            assert!(detection_order_invariance(&p, &set, &order).unwrap(), "{:?} {order:?}", p.id);
        }
    }
    assert_eq!(permutations(4).len(), 24);
}

#[test]
fn skew_sweeps_match_oracle() {
    let grid = linear_grid(0.0, FRAC_PI_2, FRAC_PI_2 / 50.0).unwrap();
    for mode in [SkewMode::Same, SkewMode::Opposite] {
        for crosstalk in [Crosstalk::On, Crosstalk::Off] {
            let p = ExperimentPreset::ghz(crosstalk);
            for row in ghz_skew_sweep(mode, crosstalk, &grid).unwrap() {
                let set: AnalyzerSettings = epr_core::experiments::skew_settings(mode, row.params[0]).into();
                assert!((row.raw - p.oracle_rate(&set).unwrap()).abs() < TOL);
            }
        }
    }
}

#[test]
fn brendel_quadrature_is_converged() {
    let spec = SpreadSpec::new(0.05, SpreadSpec::DEFAULT_NODES).unwrap();
    let fine = SpreadSpec::new(0.05, 2 * SpreadSpec::DEFAULT_NODES - 1).unwrap();
    for phi in linear_grid(0.0, 40.0 * PI, 0.37).unwrap() {
        let a = brendel_rate(phi, 0.0, &spec).unwrap().raw;
        let b = brendel_rate(phi, 0.0, &fine).unwrap().raw;
        assert!((a - b).abs() <= 1e-8, "phi = {phi}: {a} vs {b}");
    }
}

#[test]
fn franson_visibility_is_one() {
    let rates: Vec<f64> =
        linear_grid(0.0, 2.0 * PI, PI / 500.0).unwrap().iter().map(|&p| franson(p, 0.0).unwrap().raw).collect();
    let max = rates.iter().cloned().fold(f64::MIN, f64::max);
    let min = rates.iter().cloned().fold(f64::MAX, f64::min);
    assert!(((max - min) / (max + min) - 1.0).abs() < 1e-9);
}

#[test]
fn mc_standard_error_scales_with_trials() {
    let p = ExperimentPreset::ghz(Crosstalk::On);
    let set: AnalyzerSettings = [FRAC_PI_2, 0.0, 0.0, FRAC_PI_2].into();
    let a = mc_estimate(&p, &set, 200_000, RngSeed(5)).unwrap();
    let b = mc_estimate(&p, &set, 400_000, RngSeed(5)).unwrap();
    let ratio = a.stderr / b.stderr;
    assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.1, "ratio {ratio}");
    let exact = p.rate(&set).unwrap().raw;
    assert!((b.mean - exact).abs() < 4.0 * b.stderr);
}

#[test]
fn mc_converges_for_crosstalk_off() {
    let p = ExperimentPreset::ghz(Crosstalk::Off);
    let q = std::f64::consts::FRAC_PI_4;
    let set: AnalyzerSettings = [q, q, q, -q].into();
    let exact = p.rate(&set).unwrap().raw;
    let est = mc_estimate(&p, &set, 1_000_000, RngSeed(77)).unwrap();
    assert!((est.mean - exact).abs() < 4.0 * est.stderr, "{} vs {exact} ± {}", est.mean, est.stderr);
}

#[test]
fn accidental_coincidences_match_two_lambda_squared_tau() {
    // λτ = 1e-3, expected 2λ²τT = 2000 per run
    let (lambda, tau, duration) = (10.0, 1e-4, 1e5);
    let expected = 2.0 * lambda * lambda * tau * duration;
    let w = CoincidenceWindow::new(tau).unwrap();
    let mut total = 0.0;
    let runs = 10;
    for seed in 0..runs {
        let streams = [
            poisson_stream(0, lambda, duration, RngSeed(seed)).unwrap(),
            poisson_stream(1, lambda, duration, RngSeed(seed)).unwrap(),
        ];
        total += coincidence_count(&streams, w).unwrap() as f64;
    }
    let mean = total / runs as f64;
    // Poisson spread of the mean over runs: sqrt(expected / runs)
    assert!((mean - expected).abs() < 5.0 * (expected / runs as f64).sqrt() + 0.01 * expected, "{mean} vs {expected}");
}

#[test]
fn coincidence_count_is_symmetric_under_reordering() {
    let w = CoincidenceWindow::new(0.01).unwrap();
    let streams: Vec<EventStream> = (0..3).map(|d| poisson_stream(d, 20.0, 50.0, RngSeed(8)).unwrap()).collect();
    let n = coincidence_count(&streams, w).unwrap();
    for order in permutations(3) {
        let reordered: Vec<_> = order.iter().map(|&i| streams[i].clone()).collect();
        assert_eq!(coincidence_count(&reordered, w).unwrap(), n);
    }
}
