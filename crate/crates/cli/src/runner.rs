//! Executes a validated [`RunConfig`] into an [`OutputTable`].
//!
//! Sweep points are evaluated in parallel and collected in grid order, so
//! the table does not depend on the thread count.

use std::collections::BTreeMap;

use epr_core::detector::{self, coincidence_count, poisson_stream, CoincidenceWindow, McEstimate, McSampler, RngSeed};
use epr_core::experiments::{
    brendel_fringe_envelope, brendel_rate, franson, ghosh_mandel, ghz_reference_rate, ghz_regime_table, linear_grid,
    skew_settings, ExperimentPreset,
};
use epr_core::{detector_intensities, normalize, AnalyzerSettings, CoincidenceResult, Error};
use rayon::prelude::*;

use crate::config::{parameters, ExperimentKind, McPreset, RunConfig};
use crate::output::OutputTable;
use crate::CliError;

/// Stream seeds are decorrelated from the trial seeds of the same row.
const STREAM_SEED_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn run(cfg: &RunConfig, threads: Option<usize>) -> Result<OutputTable, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Io(e.to_string()))?;
    let table = pool.install(|| run_in_pool(cfg))?;
    Ok(if cfg.output.pi_units { table.with_pi_units() } else { table })
}

fn run_in_pool(cfg: &RunConfig) -> Result<OutputTable, CliError> {
    if cfg.experiment == ExperimentKind::GhzTable {
        return ghz_table(cfg);
    }
    let points = sweep_points(cfg)?;
    match cfg.experiment {
        ExperimentKind::Mc => monte_carlo(cfg, &points),
        _ => analytic(cfg, &points),
    }
}

/// Full parameter map at every grid point.
fn sweep_points(cfg: &RunConfig) -> Result<Vec<BTreeMap<String, f64>>, CliError> {
    let sweep = cfg.sweep.as_ref().expect("validated config has a sweep");
    let grid = linear_grid(sweep.start, sweep.stop, sweep.step).map_err(config_err)?;
    Ok(grid
        .into_iter()
        .map(|v| {
            let mut p = cfg.settings.clone();
            p.insert(sweep.param.clone(), v);
            p
        })
        .collect())
}

fn param_names(cfg: &RunConfig) -> Vec<&'static str> {
    parameters(cfg.experiment, cfg.mc.preset).into_iter().map(|(n, _)| n).collect()
}

fn rad_header(names: &[&str]) -> Vec<String> {
    names.iter().map(|n| format!("{n}_rad")).collect()
}

fn analytic(cfg: &RunConfig, points: &[BTreeMap<String, f64>]) -> Result<OutputTable, CliError> {
    let names = param_names(cfg);
    let kind = cfg.experiment;
    let evaluated: Vec<(CoincidenceResult, Option<f64>)> = points
        .par_iter()
        .map(|p| -> Result<_, Error> {
            let v = |n: &str| p[n];
            Ok(match kind {
                ExperimentKind::Clauser => {
                    (ExperimentPreset::clauser_aspect().rate(&[v("theta1"), v("theta2")].into())?, None)
                }
                ExperimentKind::Ghz => (
                    ExperimentPreset::ghz(cfg.crosstalk)
                        .rate(&[v("theta1"), v("theta2"), v("theta3"), v("theta4")].into())?,
                    None,
                ),
                ExperimentKind::GhzSkew => (
                    ExperimentPreset::ghz(cfg.crosstalk).rate(&skew_settings(cfg.skew_mode, v("epsilon")).into())?,
                    None,
                ),
                ExperimentKind::Franson => (franson(v("phi"), v("psi"))?, None),
                ExperimentKind::GhoshMandel => (ghosh_mandel(v("delta1"), v("delta2"))?, None),
                ExperimentKind::Brendel => (
                    brendel_rate(v("phi"), v("psi"), &cfg.spread)?,
                    Some(brendel_fringe_envelope(v("phi"), v("psi"), &cfg.spread)?),
                ),
                ExperimentKind::GhzTable | ExperimentKind::Mc => unreachable!("handled elsewhere"),
            })
        })
        .collect::<Result<_, _>>()
        .map_err(core_err)?;

    let results: Vec<CoincidenceResult> = evaluated.iter().map(|(r, _)| *r).collect();
    let normalized = normalize(&results, cfg.normalization).map_err(core_err)?;
    let ghz = matches!(kind, ExperimentKind::Ghz | ExperimentKind::GhzSkew);
    let c = if ghz { ghz_reference_rate() } else { 1.0 };

    let mut header = rad_header(&names);
    header.extend(["raw".to_owned(), "normalized".to_owned()]);
    if ghz {
        header.push("ratio_to_c".into());
    }
    if kind == ExperimentKind::Brendel {
        header.push("envelope".into());
    }
    let mut table = OutputTable::new(header);
    for ((p, (_, envelope)), n) in points.iter().zip(&evaluated).zip(&normalized) {
        let mut row: Vec<f64> = names.iter().map(|name| p[*name]).collect();
        row.extend([n.raw, n.value]);
        if ghz {
            row.push(n.raw / c);
        }
        if let Some(e) = envelope {
            row.push(*e);
        }
        table.push(row);
    }
    Ok(table)
}

fn ghz_table(cfg: &RunConfig) -> Result<OutputTable, CliError> {
    let rows = ghz_regime_table();
    let results: Vec<CoincidenceResult> = rows
        .iter()
        .map(|r| ExperimentPreset::ghz(cfg.crosstalk).rate(&AnalyzerSettings(r.params.clone())))
        .collect::<Result<_, _>>()
        .map_err(core_err)?;
    let normalized = normalize(&results, cfg.normalization).map_err(core_err)?;
    let c = ghz_reference_rate();
    let mut header = rad_header(&["theta1", "theta2", "theta3", "theta4"]);
    header.extend(["raw".to_owned(), "normalized".to_owned(), "ratio_to_c".to_owned()]);
    let mut table = OutputTable::new(header);
    for (r, n) in rows.iter().zip(&normalized) {
        let mut row = r.params.clone();
        row.extend([n.raw, n.value, n.raw / c]);
        table.push(row);
    }
    Ok(table)
}

fn mc_preset(preset: McPreset, p: &BTreeMap<String, f64>, cfg: &RunConfig) -> (ExperimentPreset, AnalyzerSettings) {
    match preset {
        McPreset::Clauser => (ExperimentPreset::clauser_aspect(), [p["theta1"], p["theta2"]].into()),
        McPreset::Ghz => {
            (ExperimentPreset::ghz(cfg.crosstalk), [p["theta1"], p["theta2"], p["theta3"], p["theta4"]].into())
        }
        McPreset::Franson => (ExperimentPreset::franson(p["phi"], p["psi"]), AnalyzerSettings::none()),
        McPreset::GhoshMandel => (ExperimentPreset::ghosh_mandel(p["delta1"], p["delta2"]), AnalyzerSettings::none()),
    }
}

/// Parallel Monte Carlo estimate; blocks are merged in block order.
pub fn parallel_mc_estimate(
    preset: &ExperimentPreset,
    settings: &AnalyzerSettings,
    trials: u64,
    seed: RngSeed,
) -> Result<McEstimate, Error> {
    let sampler = McSampler::new(preset, settings)?;
    let blocks: Vec<_> =
        (0..detector::block_count(trials)).into_par_iter().map(|b| sampler.block(seed, b, trials)).collect();
    McEstimate::from_blocks(blocks)
}

fn monte_carlo(cfg: &RunConfig, points: &[BTreeMap<String, f64>]) -> Result<OutputTable, CliError> {
    let names = param_names(cfg);
    let mc = &cfg.mc;
    let window = mc.window.map(CoincidenceWindow::new).transpose().map_err(config_err)?;
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| -> Result<Vec<f64>, Error> {
            let (preset, settings) = mc_preset(mc.preset, p, cfg);
            let seed = RngSeed(mc.seed.wrapping_add(i as u64));
            let exact = preset.rate(&settings)?.raw;
            let est = parallel_mc_estimate(&preset, &settings, mc.trials, seed)?;
            let mut row: Vec<f64> = names.iter().map(|n| p[*n]).collect();
            row.extend([exact, est.mean, est.stderr]);
            if let Some(w) = window {
                let lambdas: Vec<f64> = detector_intensities(&preset.source, &preset.network, &settings)?
                    .into_iter()
                    .map(|x| x * mc.rate)
                    .collect();
                let stream_seed = RngSeed(seed.0 ^ STREAM_SEED_MIX);
                let streams = lambdas
                    .iter()
                    .enumerate()
                    .map(|(d, &l)| poisson_stream(d, l, mc.duration, stream_seed))
                    .collect::<Result<Vec<_>, _>>()?;
                let counted = coincidence_count(&streams, w)? as f64;
                row.extend([counted, expected_accidentals(&lambdas, w.width(), mc.duration)]);
            }
            Ok(row)
        })
        .collect::<Result<_, _>>()
        .map_err(core_err)?;

    let mut header = rad_header(&names);
    header.extend(["analytic_raw", "mc_mean", "mc_stderr"].map(str::to_owned));
    if window.is_some() {
        header.extend(["accidentals", "accidentals_expected"].map(str::to_owned));
    }
    let mut table = OutputTable::new(header);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

/// Chance coincidences among independent Poisson streams for `λτ ≪ 1`:
/// `k · Πλ · τ^(k−1) · T`, which is `2 λ1 λ2 τ T` for two detectors.
pub fn expected_accidentals(lambdas: &[f64], window: f64, duration: f64) -> f64 {
    let k = lambdas.len() as f64;
    k * lambdas.iter().product::<f64>() * window.powi(lambdas.len() as i32 - 1) * duration
}

fn core_err(e: Error) -> CliError {
    match e {
        Error::DegenerateNormalization | Error::DegenerateInput => CliError::Degenerate(e.to_string()),
        _ => CliError::Config(e.to_string()),
    }
}

fn config_err(e: Error) -> CliError {
    CliError::Config(e.to_string())
}
