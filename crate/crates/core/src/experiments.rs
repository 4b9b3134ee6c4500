//! Preset experiments, regime tables and sweeps.
//!
//! GHZ rates are reported relative to `C`, the crosstalk-on rate of the
//! `{0, π/2, π/2, 0}` regime.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::correlator::{
    e2_direct_oracle, ensemble_rate, franson_rate, normalize, spread_average, AnalyzerSettings, CoincidenceResult,
    DetectorInput, Normalization, OpticalNetwork, PairingAlternative, Summation,
};
use crate::error::{Error, Result};
use crate::field::{inner_conj, Cplx, Mat2};
use crate::quadrature::simpson_mean;
use crate::sources::{
    brendel_source, clauser_aspect_source, franson_source, ghosh_mandel_source, ghz_source, SourceEnsemble, SpreadSpec,
};

/// Tolerance used when comparing rates that should agree analytically.
pub const RATE_TOL: f64 = 1e-12;

/// PBS port projectors; reflection enters with a minus sign.
const TRANSMIT: Mat2 = Mat2::real(1.0, 0.0, 0.0, 0.0);
const REFLECT: Mat2 = Mat2::real(0.0, 0.0, 0.0, -1.0);

// GHZ channel order
const A1: usize = 0;
const A2: usize = 1;
const B1: usize = 2;
const B2: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    ClauserAspect,
    Ghz,
    Franson,
    GhoshMandel,
    Brendel,
}

impl ExperimentId {
    pub fn detector_count(self) -> usize {
        match self {
            ExperimentId::Ghz => 4,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Crosstalk {
    /// Reflected and crossed-over signals arrive together and interfere.
    #[default]
    On,
    /// Pair creations are far apart in time; transmit-transmit and
    /// reflect-reflect pairings are distinguishable.
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SkewMode {
    /// All four analyzers rotate by `+ε`.
    #[default]
    Same,
    /// Analyzers 1-3 rotate by `+ε`, analyzer 4 by `−ε`.
    Opposite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPreset {
    pub id: ExperimentId,
    pub source: SourceEnsemble,
    pub network: OpticalNetwork,
}

impl ExperimentPreset {
    pub fn clauser_aspect() -> Self {
        ExperimentPreset {
            id: ExperimentId::ClauserAspect,
            source: clauser_aspect_source(),
            network: OpticalNetwork::direct(2),
        }
    }

    pub fn ghz(crosstalk: Crosstalk) -> Self {
        ExperimentPreset { id: ExperimentId::Ghz, source: ghz_source(), network: ghz_network(crosstalk) }
    }

    pub fn franson(phi: f64, psi: f64) -> Self {
        ExperimentPreset { id: ExperimentId::Franson, source: franson_source(phi, psi), network: interferometer() }
    }

    pub fn ghosh_mandel(delta1: f64, delta2: f64) -> Self {
        ExperimentPreset {
            id: ExperimentId::GhoshMandel,
            source: ghosh_mandel_source(delta1, delta2),
            network: interferometer(),
        }
    }

    /// One spectral slice `s` of the dispersive source.
    pub fn brendel(phi: f64, psi: f64, s: f64) -> Result<Self> {
        Ok(ExperimentPreset {
            id: ExperimentId::Brendel,
            source: brendel_source(phi, psi, s)?,
            network: interferometer(),
        })
    }

    pub fn detector_count(&self) -> usize {
        self.network.detector_count()
    }

    pub fn rate(&self, settings: &AnalyzerSettings) -> Result<CoincidenceResult> {
        ensemble_rate(&self.source, &self.network, settings)
    }

    pub fn oracle_rate(&self, settings: &AnalyzerSettings) -> Result<f64> {
        e2_direct_oracle(&self.source, &self.network, settings)
    }

    /// Same experiment with the detectors evaluated in the order `order`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        Ok(ExperimentPreset { network: self.network.permute_detectors(order)?, ..self.clone() })
    }
}

fn interferometer() -> OpticalNetwork {
    OpticalNetwork::InnerProduct { left: 0, right: 1 }
}

/// A1 and B1 go straight to analyzers 1 and 4; A2 and B2 enter opposite
/// faces of a PBS whose outputs feed analyzers 2 and 3.
fn ghz_network(crosstalk: Crosstalk) -> OpticalNetwork {
    let outer =
        |d2: DetectorInput, d3: DetectorInput| vec![DetectorInput::direct(A1), d2, d3, DetectorInput::direct(B1)];
    let alternatives = match crosstalk {
        Crosstalk::On => vec![PairingAlternative {
            detectors: outer(
                DetectorInput::combine([(B2, TRANSMIT), (A2, REFLECT)]),
                DetectorInput::combine([(A2, TRANSMIT), (B2, REFLECT)]),
            ),
            summation: Summation::Coherent,
        }],
        Crosstalk::Off => vec![
            PairingAlternative {
                detectors: outer(DetectorInput::combine([(B2, TRANSMIT)]), DetectorInput::combine([(A2, TRANSMIT)])),
                summation: Summation::Incoherent,
            },
            PairingAlternative {
                detectors: outer(DetectorInput::combine([(A2, REFLECT)]), DetectorInput::combine([(B2, REFLECT)])),
                summation: Summation::Incoherent,
            },
        ],
    };
    OpticalNetwork::analyzers(alternatives).expect("static GHZ network is valid")
}

/// One row of a sweep or table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: Vec<f64>,
    pub raw: f64,
    pub normalized: f64,
}

/// Inclusive grid `start, start + step, ...` up to `stop`.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Config("sweep step must be positive"));
    }
    if !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::Config("sweep stop must not precede start"));
    }
    let count = libm::floor((stop - start) / step + 1e-9) as usize + 1;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

/// Twofold rate for the cascade source; `value` is normalized by the
/// detector intensities, which makes it `sin²(θ1 − θ2)`.
pub fn clauser_aspect(theta1: f64, theta2: f64) -> Result<CoincidenceResult> {
    let r = ExperimentPreset::clauser_aspect().rate(&[theta1, theta2].into())?;
    Ok(normalize(&[r], Normalization::Denominator)?[0])
}

pub fn ghz_rate(theta: [f64; 4], crosstalk: Crosstalk) -> Result<CoincidenceResult> {
    ExperimentPreset::ghz(crosstalk).rate(&theta.into())
}

/// The reference fourfold rate `C`.
pub fn ghz_reference_rate() -> f64 {
    ghz_rate([0.0, FRAC_PI_2, FRAC_PI_2, 0.0], Crosstalk::On).expect("static GHZ configuration").raw
}

/// All 16 regimes with every analyzer at 0 or π/2 (analyzer 1 most
/// significant), crosstalk on, normalized to `C`.
pub fn ghz_regime_table() -> Vec<SweepRow> {
    let c = ghz_reference_rate();
    let preset = ExperimentPreset::ghz(Crosstalk::On);
    (0..16u32)
        .map(|code| {
            let theta: Vec<f64> = (0..4).map(|bit| if code >> (3 - bit) & 1 == 1 { FRAC_PI_2 } else { 0.0 }).collect();
            let raw = preset.rate(&AnalyzerSettings(theta.clone())).expect("static GHZ configuration").raw;
            SweepRow { params: theta, raw, normalized: raw / c }
        })
        .collect()
}

/// Analyzer angles after skewing the `{π/2, 0, 0, π/2}` regime by `epsilon`.
pub fn skew_settings(mode: SkewMode, epsilon: f64) -> [f64; 4] {
    let last = match mode {
        SkewMode::Same => epsilon,
        SkewMode::Opposite => -epsilon,
    };
    [FRAC_PI_2 + epsilon, epsilon, epsilon, FRAC_PI_2 + last]
}

/// Fourfold rate versus skew; rows hold `[ε]` and the rate relative to `C`.
pub fn ghz_skew_sweep(mode: SkewMode, crosstalk: Crosstalk, grid: &[f64]) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Config("skew grid is empty"));
    }
    let c = ghz_reference_rate();
    let preset = ExperimentPreset::ghz(crosstalk);
    grid.iter()
        .map(|&eps| {
            let raw = preset.rate(&skew_settings(mode, eps).into())?.raw;
            Ok(SweepRow { params: vec![eps], raw, normalized: raw / c })
        })
        .collect()
}

/// `(1 + cos(φ − ψ))/2`.
pub fn franson(phi: f64, psi: f64) -> Result<CoincidenceResult> {
    franson_rate(&franson_source(phi, psi))
}

pub fn ghosh_mandel(delta1: f64, delta2: f64) -> Result<CoincidenceResult> {
    franson_rate(&ghosh_mandel_source(delta1, delta2))
}

/// Franson rate averaged over the uniform spread in `spec`.
pub fn brendel_rate(phi: f64, psi: f64, spec: &SpreadSpec) -> Result<CoincidenceResult> {
    spread_average(|p, q, s| Ok(franson_rate(&brendel_source(p, q, s)?)?.raw), phi, psi, spec)
}

/// Modulus of the spread-averaged complex fringe `2·conj(E_l)·E_r − 1`,
/// i.e. the local fringe amplitude around `φ`.
pub fn brendel_fringe_envelope(phi: f64, psi: f64, spec: &SpreadSpec) -> Result<f64> {
    let fringe = |s: f64| -> Result<Cplx> {
        let ens = brendel_source(phi, psi, s)?;
        let ch = &ens.realizations()[0].channels;
        Ok(inner_conj(&ch[0], &ch[1]) * 2.0 - 1.0)
    };
    let s = spec.s_max();
    let re = simpson_mean(|x| Ok::<_, Error>(fringe(x)?.re), -s, s, spec.nodes())?;
    let im = simpson_mean(|x| Ok::<_, Error>(fringe(x)?.im), -s, s, spec.nodes())?;
    Ok(libm::hypot(re, im))
}

/// Spread-averaged fringe over a grid of `φ`; rows hold `[φ, ψ]`,
/// normalized to the sweep maximum.
pub fn brendel_sweep(phi_grid: &[f64], psi: f64, spec: &SpreadSpec) -> Result<Vec<SweepRow>> {
    if phi_grid.is_empty() {
        return Err(Error::Config("phase grid is empty"));
    }
    let results = phi_grid.iter().map(|&phi| brendel_rate(phi, psi, spec)).collect::<Result<Vec<_>>>()?;
    let normalized = normalize(&results, Normalization::MaxOfSweep)?;
    Ok(phi_grid
        .iter()
        .zip(normalized)
        .map(|(&phi, r)| SweepRow { params: vec![phi, psi], raw: r.raw, normalized: r.value })
        .collect())
}

/// Whether evaluating the detectors in the order `order` leaves the rate
/// unchanged. For the two-arm interferometers a swap exchanges the arms.
pub fn detection_order_invariance(
    preset: &ExperimentPreset,
    settings: &AnalyzerSettings,
    order: &[usize],
) -> Result<bool> {
    let original = preset.rate(settings)?.raw;
    let permuted = preset.permuted(order)?.rate(&settings.permute(order)?)?.raw;
    Ok((original - permuted).abs() <= RATE_TOL)
}
