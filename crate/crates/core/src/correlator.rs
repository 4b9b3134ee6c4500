//! Coincidence-rate engine.
//!
//! For analyzer networks the coincidence amplitude of one realization is the
//! product of the scalar analyzer-output amplitudes at every detector. The
//! ensemble average is taken at amplitude level over indistinguishable
//! (same-pulse) realizations and squared last. Alternatives that are
//! distinguishable in time add at rate level.
//!
//! Interferometric setups whose two modes are long/short paths use the
//! conjugated inner product of the two arms instead of per-detector analyzers.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{inner_conj, polarizer, project, Cplx, FieldVec2, Mat2};
use crate::quadrature::simpson_mean;
use crate::sources::{EmissionRealization, SourceEnsemble, SpreadSpec};

/// One source channel routed through a fixed 2x2 element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelTerm {
    pub channel: usize,
    pub coefficient: Mat2,
}

/// Field arriving at one analyzer: a sum of routed source channels.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorInput {
    pub terms: Vec<ChannelTerm>,
}

impl DetectorInput {
    pub fn direct(channel: usize) -> Self {
        DetectorInput { terms: vec![ChannelTerm { channel, coefficient: Mat2::IDENTITY }] }
    }

    pub fn combine(terms: impl IntoIterator<Item = (usize, Mat2)>) -> Self {
        DetectorInput {
            terms: terms.into_iter().map(|(channel, coefficient)| ChannelTerm { channel, coefficient }).collect(),
        }
    }

    pub fn field(&self, channels: &[FieldVec2]) -> FieldVec2 {
        self.terms.iter().fold(FieldVec2::ZERO, |acc, t| acc + t.coefficient * channels[t.channel])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summation {
    /// Indistinguishable: added at amplitude level with the other coherent alternatives.
    Coherent,
    /// Distinguishable: contributes its own squared amplitude.
    Incoherent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairingAlternative {
    pub detectors: Vec<DetectorInput>,
    pub summation: Summation,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpticalNetwork {
    /// One analyzer per detector; settings are analyzer angles.
    Analyzers { alternatives: Vec<PairingAlternative> },
    /// Two-arm interferometer read out through the conjugated inner product
    /// of the arm fields; takes no analyzer settings.
    InnerProduct { left: usize, right: usize },
}

impl OpticalNetwork {
    pub fn analyzers(alternatives: Vec<PairingAlternative>) -> Result<Self> {
        let first = alternatives.first().ok_or(Error::Config("network needs at least one pairing alternative"))?;
        let n = first.detectors.len();
        if n == 0 {
            return Err(Error::Config("network needs at least one detector"));
        }
        for alt in &alternatives {
            if alt.detectors.len() != n {
                return Err(Error::Arity { expected: n, found: alt.detectors.len(), what: "alternative detectors" });
            }
        }
        Ok(OpticalNetwork::Analyzers { alternatives })
    }

    /// Every detector fed straight from the channel of the same index.
    pub fn direct(detectors: usize) -> Self {
        OpticalNetwork::Analyzers {
            alternatives: vec![PairingAlternative {
                detectors: (0..detectors).map(DetectorInput::direct).collect(),
                summation: Summation::Coherent,
            }],
        }
    }

    pub fn detector_count(&self) -> usize {
        match self {
            OpticalNetwork::Analyzers { alternatives } => alternatives[0].detectors.len(),
            OpticalNetwork::InnerProduct { .. } => 2,
        }
    }

    /// Number of analyzer angles the network expects.
    pub fn analyzer_count(&self) -> usize {
        match self {
            OpticalNetwork::Analyzers { .. } => self.detector_count(),
            OpticalNetwork::InnerProduct { .. } => 0,
        }
    }

    /// Checks that every referenced channel exists in a source of `channels` channels.
    pub fn validate(&self, channels: usize) -> Result<()> {
        let check = |channel: usize| {
            if channel < channels {
                Ok(())
            } else {
                Err(Error::UnknownChannel { channel, channels })
            }
        };
        match self {
            OpticalNetwork::Analyzers { alternatives } => alternatives
                .iter()
                .flat_map(|a| a.detectors.iter())
                .flat_map(|d| d.terms.iter())
                .try_for_each(|t| check(t.channel)),
            OpticalNetwork::InnerProduct { left, right } => check(*left).and_then(|_| check(*right)),
        }
    }

    /// Network with detectors evaluated in the order given by `order`
    /// (`order[i]` is the old index of new detector `i`).
    pub fn permute_detectors(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.detector_count())?;
        Ok(match self {
            OpticalNetwork::Analyzers { alternatives } => OpticalNetwork::Analyzers {
                alternatives: alternatives
                    .iter()
                    .map(|a| PairingAlternative {
                        detectors: order.iter().map(|&i| a.detectors[i].clone()).collect(),
                        summation: a.summation,
                    })
                    .collect(),
            },
            OpticalNetwork::InnerProduct { left, right } => {
                let arms = [*left, *right];
                OpticalNetwork::InnerProduct { left: arms[order[0]], right: arms[order[1]] }
            }
        })
    }

    /// Rate-level groups: all coherent alternatives form one group, each
    /// incoherent alternative its own.
    fn groups(alternatives: &[PairingAlternative]) -> Vec<Vec<&PairingAlternative>> {
        let coherent: Vec<_> = alternatives.iter().filter(|a| a.summation == Summation::Coherent).collect();
        let mut groups = Vec::new();
        if !coherent.is_empty() {
            groups.push(coherent);
        }
        groups.extend(alternatives.iter().filter(|a| a.summation == Summation::Incoherent).map(|a| vec![a]));
        groups
    }
}

pub(crate) fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::Arity { expected: n, found: order.len(), what: "permutation" });
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || core::mem::replace(&mut seen[i], true) {
            return Err(Error::Config("not a permutation of the detector indices"));
        }
    }
    Ok(())
}

/// Analyzer angles in radians, one per detector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalyzerSettings(pub Vec<f64>);

impl AnalyzerSettings {
    pub fn none() -> Self {
        AnalyzerSettings(Vec::new())
    }

    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        if self.0.is_empty() {
            return Ok(self.clone());
        }
        check_permutation(order, self.0.len())?;
        Ok(AnalyzerSettings(order.iter().map(|&i| self.0[i]).collect()))
    }
}

impl From<&[f64]> for AnalyzerSettings {
    fn from(v: &[f64]) -> Self {
        AnalyzerSettings(v.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for AnalyzerSettings {
    fn from(v: [f64; N]) -> Self {
        AnalyzerSettings(v.to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    Raw,
    #[default]
    MaxOfSweep,
    /// Divide by the product of mean detector intensities.
    Denominator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceResult {
    pub raw: f64,
    pub normalization: Normalization,
    pub value: f64,
    /// Product of ensemble-mean detector intensities.
    pub denominator: f64,
}

impl CoincidenceResult {
    fn raw(raw: f64, denominator: f64) -> Self {
        CoincidenceResult { raw, normalization: Normalization::Raw, value: raw, denominator }
    }
}

/// Per-realization amplitudes, one column per rate-level group, already
/// scaled so that `Σ_g |Σ_r w_r a[r][g]|²` is the raw rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTable {
    pub weights: Vec<f64>,
    pub amplitudes: Vec<Vec<Cplx>>,
}

impl AmplitudeTable {
    pub fn build(ens: &SourceEnsemble, net: &OpticalNetwork, set: &AnalyzerSettings) -> Result<Self> {
        check_arity(ens, net, set)?;
        let weights = ens.realizations().iter().map(|r| r.weight).collect();
        let amplitudes = match net {
            OpticalNetwork::Analyzers { alternatives } => {
                let groups = OpticalNetwork::groups(alternatives);
                ens.realizations()
                    .iter()
                    .map(|r| {
                        groups.iter().map(|g| g.iter().map(|alt| alternative_amplitude(r, alt, set)).sum()).collect()
                    })
                    .collect()
            }
            OpticalNetwork::InnerProduct { left, right } => {
                let (nl, nr) = mean_arm_norms(ens, *left, *right);
                if nl == 0.0 || nr == 0.0 {
                    return Err(Error::DegenerateInput);
                }
                let scale = 1.0 / libm::sqrt(nl * nr);
                ens.realizations()
                    .iter()
                    .map(|r| vec![inner_conj(&r.channels[*left], &r.channels[*right]) * scale])
                    .collect()
            }
        };
        Ok(AmplitudeTable { weights, amplitudes })
    }

    pub fn group_count(&self) -> usize {
        self.amplitudes.first().map_or(0, Vec::len)
    }

    pub fn rate(&self) -> f64 {
        (0..self.group_count())
            .map(|g| self.weights.iter().zip(&self.amplitudes).map(|(w, a)| a[g] * *w).sum::<Cplx>().norm_sqr())
            .sum()
    }
}

fn mean_arm_norms(ens: &SourceEnsemble, left: usize, right: usize) -> (f64, f64) {
    ens.realizations().iter().fold((0.0, 0.0), |(l, r), re| {
        (l + re.weight * re.channels[left].norm_sqr(), r + re.weight * re.channels[right].norm_sqr())
    })
}

fn check_arity(ens: &SourceEnsemble, net: &OpticalNetwork, set: &AnalyzerSettings) -> Result<()> {
    net.validate(ens.channel_count())?;
    if set.0.len() != net.analyzer_count() {
        return Err(Error::Arity { expected: net.analyzer_count(), found: set.0.len(), what: "analyzer settings" });
    }
    Ok(())
}

fn alternative_amplitude(r: &EmissionRealization, alt: &PairingAlternative, set: &AnalyzerSettings) -> Cplx {
    alt.detectors.iter().zip(&set.0).map(|(d, &theta)| project(&d.field(&r.channels), theta)).product()
}

/// Product of analyzer-output amplitudes for one realization through one
/// pairing alternative.
pub fn coincidence_amplitude(
    r: &EmissionRealization,
    alt: &PairingAlternative,
    set: &AnalyzerSettings,
) -> Result<Cplx> {
    if set.0.len() != alt.detectors.len() {
        return Err(Error::Arity { expected: alt.detectors.len(), found: set.0.len(), what: "analyzer settings" });
    }
    for t in alt.detectors.iter().flat_map(|d| d.terms.iter()) {
        if t.channel >= r.channels.len() {
            return Err(Error::UnknownChannel { channel: t.channel, channels: r.channels.len() });
        }
    }
    Ok(alternative_amplitude(r, alt, set))
}

/// Ensemble-averaged coincidence rate, unnormalized.
pub fn ensemble_rate(ens: &SourceEnsemble, net: &OpticalNetwork, set: &AnalyzerSettings) -> Result<CoincidenceResult> {
    let table = AmplitudeTable::build(ens, net, set)?;
    let denominator = match net {
        OpticalNetwork::Analyzers { alternatives } => analyzer_intensities(ens, alternatives, set).iter().product(),
        // the inner-product readout is already normalized by the arm intensities
        OpticalNetwork::InnerProduct { .. } => 1.0,
    };
    Ok(CoincidenceResult::raw(table.rate(), denominator))
}

/// Ensemble-mean intensity reaching each detector.
pub fn detector_intensities(ens: &SourceEnsemble, net: &OpticalNetwork, set: &AnalyzerSettings) -> Result<Vec<f64>> {
    check_arity(ens, net, set)?;
    Ok(match net {
        OpticalNetwork::Analyzers { alternatives } => analyzer_intensities(ens, alternatives, set),
        OpticalNetwork::InnerProduct { left, right } => {
            let (l, r) = mean_arm_norms(ens, *left, *right);
            vec![l, r]
        }
    })
}

/// Mean intensity at each analyzer output; time-separated alternatives add.
fn analyzer_intensities(ens: &SourceEnsemble, alternatives: &[PairingAlternative], set: &AnalyzerSettings) -> Vec<f64> {
    (0..set.0.len())
        .map(|i| {
            ens.realizations()
                .iter()
                .map(|r| {
                    r.weight
                        * alternatives
                            .iter()
                            .map(|a| project(&a.detectors[i].field(&r.channels), set.0[i]).norm_sqr())
                            .sum::<f64>()
                })
                .sum()
        })
        .collect()
}

/// Two-arm interferometer rate `|conj(E_l)·E_r|² / (|E_l|² |E_r|²)`.
pub fn franson_rate(ens: &SourceEnsemble) -> Result<CoincidenceResult> {
    let [r] = ens.realizations() else {
        return Err(Error::Arity { expected: 1, found: ens.realizations().len(), what: "Franson realizations" });
    };
    let [el, er] = r.channels.as_slice() else {
        return Err(Error::Arity { expected: 2, found: r.channels.len(), what: "Franson channels" });
    };
    let norms = el.norm_sqr() * er.norm_sqr();
    if norms == 0.0 {
        return Err(Error::DegenerateInput);
    }
    Ok(CoincidenceResult::raw(inner_conj(el, er).norm_sqr() / norms, 1.0))
}

/// Mean of `evaluator(φ, ψ, s)` over `s ∈ [−s_max, s_max]` by composite Simpson.
pub fn spread_average<F>(mut evaluator: F, phi: f64, psi: f64, spec: &SpreadSpec) -> Result<CoincidenceResult>
where
    F: FnMut(f64, f64, f64) -> Result<f64>,
{
    let s = spec.s_max();
    let raw = simpson_mean(|x| evaluator(phi, psi, x), -s, s, spec.nodes())?;
    Ok(CoincidenceResult::raw(raw, 1.0))
}

/// Brute-force rate: expands every detector field into its channel terms and
/// sums `conj(term) · term'` over all pairs of term tuples and realizations.
///
/// Scalar analyzer outputs are formed by pushing the field through the full
/// polarizer matrix and reading the component along the analyzer axis,
/// independently of [`project`]. Intended for small instances.
pub fn e2_direct_oracle(ens: &SourceEnsemble, net: &OpticalNetwork, set: &AnalyzerSettings) -> Result<f64> {
    check_arity(ens, net, set)?;
    match net {
        OpticalNetwork::Analyzers { alternatives } => {
            let mut total = 0.0;
            for group in OpticalNetwork::groups(alternatives) {
                // every (weight, product-of-term-amplitudes) of the expanded numerator
                let mut terms: Vec<(f64, Cplx)> = Vec::new();
                for r in ens.realizations() {
                    for alt in &group {
                        let per_detector: Vec<Vec<Cplx>> = alt
                            .detectors
                            .iter()
                            .zip(&set.0)
                            .map(|(d, &theta)| {
                                d.terms
                                    .iter()
                                    .map(|t| analyzer_output(t.coefficient * r.channels[t.channel], theta))
                                    .collect()
                            })
                            .collect();
                        expand_products(&per_detector, r.weight, &mut terms);
                    }
                }
                let mut acc = Cplx::new(0.0, 0.0);
                for &(w1, a1) in &terms {
                    for &(w2, a2) in &terms {
                        acc += a1.conj() * a2 * (w1 * w2);
                    }
                }
                total += acc.re;
            }
            Ok(total)
        }
        OpticalNetwork::InnerProduct { left, right } => {
            let mut num = Cplx::new(0.0, 0.0);
            let (mut nl, mut nr) = (0.0, 0.0);
            let comps = |e: &FieldVec2| [e.c0, e.c1];
            for r1 in ens.realizations() {
                let (a, b) = (comps(&r1.channels[*left]), comps(&r1.channels[*right]));
                for j in 0..2 {
                    nl += r1.weight * (a[j].conj() * a[j]).re;
                    nr += r1.weight * (b[j].conj() * b[j]).re;
                }
                for r2 in ens.realizations() {
                    let (a2, b2) = (comps(&r2.channels[*left]), comps(&r2.channels[*right]));
                    for j in 0..2 {
                        for k in 0..2 {
                            num += a[j] * b[j].conj() * a2[k].conj() * b2[k] * (r1.weight * r2.weight);
                        }
                    }
                }
            }
            if nl == 0.0 || nr == 0.0 {
                return Err(Error::DegenerateInput);
            }
            Ok(num.re / (nl * nr))
        }
    }
}

fn analyzer_output(field: FieldVec2, theta: f64) -> Cplx {
    let through = polarizer(theta) * field;
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    through.c0 * c + through.c1 * s
}

fn expand_products(per_detector: &[Vec<Cplx>], weight: f64, out: &mut Vec<(f64, Cplx)>) {
    fn rec(rest: &[Vec<Cplx>], acc: Cplx, weight: f64, out: &mut Vec<(f64, Cplx)>) {
        match rest.split_first() {
            None => out.push((weight, acc)),
            Some((head, tail)) => {
                for &t in head {
                    rec(tail, acc * t, weight, out);
                }
            }
        }
    }
    rec(per_detector, Cplx::new(1.0, 0.0), weight, out);
}

/// Applies a normalization mode to a sweep, preserving order.
pub fn normalize(results: &[CoincidenceResult], mode: Normalization) -> Result<Vec<CoincidenceResult>> {
    let scale = |r: &CoincidenceResult, by: f64| CoincidenceResult { value: r.raw / by, normalization: mode, ..*r };
    match mode {
        Normalization::Raw => {
            Ok(results.iter().map(|r| CoincidenceResult { value: r.raw, normalization: mode, ..*r }).collect())
        }
        Normalization::MaxOfSweep => {
            let max = results.iter().map(|r| r.raw).fold(0.0, f64::max);
            if !(max > 0.0) {
                return Err(Error::DegenerateNormalization);
            }
            Ok(results.iter().map(|r| scale(r, max)).collect())
        }
        Normalization::Denominator => results
            .iter()
            .map(|r| {
                if r.denominator > 0.0 {
                    Ok(scale(r, r.denominator))
                } else if r.raw == 0.0 {
                    // nothing reaches a detector: no coincidences to normalize
                    Ok(CoincidenceResult { value: 0.0, normalization: mode, ..*r })
                } else {
                    Err(Error::DegenerateNormalization)
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{clauser_aspect_source, franson_source, ghz_source};
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn ca_net() -> OpticalNetwork {
        OpticalNetwork::direct(2)
    }

    #[test]
    fn clauser_amplitude_hand_expansion() {
        let ens = clauser_aspect_source();
        let OpticalNetwork::Analyzers { alternatives } = ca_net() else { unreachable!() };
        let r0 = &ens.realizations()[0];
        let a = coincidence_amplitude(r0, &alternatives[0], &[0.0, FRAC_PI_2].into()).unwrap();
        assert!((a - Cplx::new(-1.0, 0.0)).norm() < TOL);
        // extinguished: S1 = x against a y analyzer
        let a = coincidence_amplitude(r0, &alternatives[0], &[FRAC_PI_2, FRAC_PI_2].into()).unwrap();
        assert!(a.norm() < TOL);
    }

    #[test]
    fn clauser_rates() {
        let ens = clauser_aspect_source();
        assert!(ensemble_rate(&ens, &ca_net(), &[0.3, 0.3].into()).unwrap().raw.abs() < TOL);
        let r = ensemble_rate(&ens, &ca_net(), &[0.0, FRAC_PI_2].into()).unwrap();
        assert!((r.raw - 0.25).abs() < TOL);
        // each detector sees half the light
        assert!((r.denominator - 0.25).abs() < TOL);
    }

    #[test]
    fn arity_errors() {
        let ens = clauser_aspect_source();
        assert!(matches!(ensemble_rate(&ens, &ca_net(), &[0.0].into()), Err(Error::Arity { .. })));
        let bad = OpticalNetwork::direct(3);
        assert!(matches!(
            ensemble_rate(&ens, &bad, &[0.0; 3].into()),
            Err(Error::UnknownChannel { channel: 2, channels: 2 })
        ));
        assert!(OpticalNetwork::analyzers(vec![]).is_err());
    }

    #[test]
    fn franson_rate_examples() {
        let f = |phi, psi| franson_rate(&franson_source(phi, psi)).unwrap().raw;
        assert!((f(0.4, 0.4) - 1.0).abs() < TOL);
        assert!(f(PI + 0.2, 0.2).abs() < TOL);
        assert!((f(FRAC_PI_2, 0.0) - 0.5).abs() < TOL);
        let net = OpticalNetwork::InnerProduct { left: 0, right: 1 };
        let via_engine = ensemble_rate(&franson_source(1.0, 0.3), &net, &AnalyzerSettings::none()).unwrap();
        assert!((via_engine.raw - (1.0 + libm::cos(0.7)) / 2.0).abs() < TOL);
    }

    #[test]
    fn franson_rate_rejects_zero_norm() {
        let ens = SourceEnsemble::new(vec![EmissionRealization {
            channels: vec![FieldVec2::ZERO, FieldVec2::real(1.0, 0.0)],
            weight: 1.0,
            modes: Default::default(),
        }])
        .unwrap();
        assert_eq!(franson_rate(&ens), Err(Error::DegenerateInput));
        assert!(franson_rate(&clauser_aspect_source()).is_err());
    }

    #[test]
    fn oracle_single_realization_is_amplitude_squared() {
        let ens = franson_source(0.0, 0.0);
        let net = OpticalNetwork::direct(2);
        let set: AnalyzerSettings = [0.2, -0.9].into();
        let r = &ens.realizations()[0];
        let OpticalNetwork::Analyzers { alternatives } = &net else { unreachable!() };
        let amp = coincidence_amplitude(r, &alternatives[0], &set).unwrap();
        assert!((e2_direct_oracle(&ens, &net, &set).unwrap() - amp.norm_sqr()).abs() < TOL);
    }

    #[test]
    fn oracle_matches_on_clauser_grid() {
        let ens = clauser_aspect_source();
        for i in 0..19 {
            let t2 = i as f64 * PI / 18.0;
            let set: AnalyzerSettings = [0.1, t2].into();
            let engine = ensemble_rate(&ens, &ca_net(), &set).unwrap().raw;
            assert!((engine - e2_direct_oracle(&ens, &ca_net(), &set).unwrap()).abs() < TOL);
        }
    }

    #[test]
    fn spread_average_of_constant() {
        let spec = SpreadSpec::new(0.3, 11).unwrap();
        let r = spread_average(|_, _, _| Ok(1.0), 0.0, 0.0, &spec).unwrap();
        assert!((r.raw - 1.0).abs() < TOL);
    }

    #[test]
    fn normalization_modes() {
        let rs: Vec<_> = [0.0, 0.1, 0.4, 0.2].iter().map(|&x| CoincidenceResult::raw(x, 0.5)).collect();
        let raw = normalize(&rs, Normalization::Raw).unwrap();
        assert!(raw.iter().zip(&rs).all(|(a, b)| a.value == b.raw));
        let max = normalize(&rs, Normalization::MaxOfSweep).unwrap();
        assert_eq!(max[2].value, 1.0);
        assert!((max[1].value - 0.25).abs() < TOL);
        let den = normalize(&rs, Normalization::Denominator).unwrap();
        assert!((den[2].value - 0.8).abs() < TOL);
        let one = normalize(&rs[1..2], Normalization::MaxOfSweep).unwrap();
        assert_eq!(one[0].value, 1.0);
        let zeros = [CoincidenceResult::raw(0.0, 1.0); 3];
        assert_eq!(normalize(&zeros, Normalization::MaxOfSweep), Err(Error::DegenerateNormalization));
    }

    #[test]
    fn coherent_and_incoherent_agree_for_single_alternative() {
        let ens = ghz_source();
        let base = OpticalNetwork::direct(4);
        let OpticalNetwork::Analyzers { alternatives } = &base else { unreachable!() };
        let mut incoherent = alternatives[0].clone();
        incoherent.summation = Summation::Incoherent;
        let set: AnalyzerSettings = [0.3, 1.2, -0.4, FRAC_PI_4].into();
        let a = ensemble_rate(&ens, &base, &set).unwrap().raw;
        let one = OpticalNetwork::analyzers(vec![incoherent.clone()]).unwrap();
        assert!((ensemble_rate(&ens, &one, &set).unwrap().raw - a).abs() < TOL);
        let three = OpticalNetwork::analyzers(vec![incoherent; 3]).unwrap();
        assert!((ensemble_rate(&ens, &three, &set).unwrap().raw - 3.0 * a).abs() < TOL);
    }

    #[test]
    fn permutation_checks() {
        assert!(check_permutation(&[1, 0, 2], 3).is_ok());
        assert!(check_permutation(&[1, 1, 2], 3).is_err());
        assert!(check_permutation(&[0, 1], 3).is_err());
        assert!(check_permutation(&[0, 3, 1], 3).is_err());
    }

    proptest! {
        #[test]
        fn global_phase_does_not_change_rate(
            t1 in -4.0..4.0f64, t2 in -4.0..4.0f64, t3 in -4.0..4.0f64, t4 in -4.0..4.0f64,
            phase in -4.0..4.0f64,
        ) {
            let ens = ghz_source();
            let u = Cplx::from_polar(1.0, phase);
            let rotated = SourceEnsemble::new(
                ens.realizations()
                    .iter()
                    .map(|r| EmissionRealization { channels: r.channels.iter().map(|c| c.scale(u)).collect(), ..r.clone() })
                    .collect(),
            ).unwrap();
            let net = OpticalNetwork::direct(4);
            let set: AnalyzerSettings = [t1, t2, t3, t4].into();
            let a = ensemble_rate(&ens, &net, &set).unwrap().raw;
            let b = ensemble_rate(&rotated, &net, &set).unwrap().raw;
            prop_assert!(a >= 0.0);
            prop_assert!((a - b).abs() < TOL);
        }
    }
}
