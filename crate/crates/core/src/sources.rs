//! Emission models. Each source is enumerated exhaustively into weighted
//! realizations, so ensemble averages are exact sums.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{phase_arm, FieldVec2};

const WEIGHT_TOL: f64 = 1e-12;

/// Discrete mode indices of a realization; `None` where a source has no such mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ModeIndices {
    pub n: Option<u8>,
    pub m: Option<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmissionRealization {
    pub channels: Vec<FieldVec2>,
    pub weight: f64,
    pub modes: ModeIndices,
}

/// Uniform fractional frequency spread `s ∈ [−s_max, s_max]` and the
/// Simpson node count used to average over it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadSpec {
    s_max: f64,
    nodes: usize,
}

impl SpreadSpec {
    pub const DEFAULT_NODES: usize = 201;

    pub fn new(s_max: f64, nodes: usize) -> Result<Self> {
        if !(s_max > 0.0 && s_max < 1.0) {
            return Err(Error::Config("spread s_max must lie in (0, 1)"));
        }
        if nodes < 3 {
            return Err(Error::Config("quadrature needs at least 3 nodes"));
        }
        if nodes.is_multiple_of(2) {
            return Err(Error::Config("quadrature node count must be odd"));
        }
        Ok(SpreadSpec { s_max, nodes })
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceEnsemble {
    realizations: Vec<EmissionRealization>,
    spread: Option<SpreadSpec>,
}

impl SourceEnsemble {
    /// Validates weights (each in [0,1], summing to 1) and a common channel arity.
    pub fn new(realizations: Vec<EmissionRealization>) -> Result<Self> {
        let first = realizations.first().ok_or(Error::Config("ensemble has no realizations"))?;
        let arity = first.channels.len();
        let mut total = 0.0;
        for r in &realizations {
            if r.channels.len() != arity {
                return Err(Error::Arity { expected: arity, found: r.channels.len(), what: "realization channels" });
            }
            if !(0.0..=1.0).contains(&r.weight) {
                return Err(Error::Domain("realization weight outside [0, 1]"));
            }
            total += r.weight;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::Domain("realization weights do not sum to 1"));
        }
        Ok(SourceEnsemble { realizations, spread: None })
    }

    pub fn with_spread(mut self, spread: SpreadSpec) -> Self {
        self.spread = Some(spread);
        self
    }

    pub fn realizations(&self) -> &[EmissionRealization] {
        &self.realizations
    }

    pub fn spread(&self) -> Option<SpreadSpec> {
        self.spread
    }

    pub fn channel_count(&self) -> usize {
        self.realizations[0].channels.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.realizations.iter().map(|r| r.weight).sum()
    }
}

/// Anticorrelated pair confined to the x/y modes: `(cos nπ/2, sin nπ/2)` and
/// `(sin nπ/2, −cos nπ/2)`. Exact values at n ∈ {0, 1}.
fn anticorrelated_pair(n: u8) -> (FieldVec2, FieldVec2) {
    match n {
        0 => (FieldVec2::real(1.0, 0.0), FieldVec2::real(0.0, -1.0)),
        _ => (FieldVec2::real(0.0, 1.0), FieldVec2::real(1.0, 0.0)),
    }
}

/// Cascade source: two realizations (n = 0, 1), weight 1/2, channels (S1, S2).
pub fn clauser_aspect_source() -> SourceEnsemble {
    let realizations = (0..2u8)
        .map(|n| {
            let (s1, s2) = anticorrelated_pair(n);
            EmissionRealization { channels: vec![s1, s2], weight: 0.5, modes: ModeIndices { n: Some(n), m: None } }
        })
        .collect();
    SourceEnsemble::new(realizations).expect("static ensemble is valid")
}

/// Double-pass down-conversion: two independent anticorrelated pairs,
/// channels (A1, A2, B1, B2), four realizations of weight 1/4.
pub fn ghz_source() -> SourceEnsemble {
    let mut realizations = Vec::with_capacity(4);
    for n in 0..2u8 {
        for m in 0..2u8 {
            let (a1, a2) = anticorrelated_pair(n);
            let (b1, b2) = anticorrelated_pair(m);
            realizations.push(EmissionRealization {
                channels: vec![a1, a2, b1, b2],
                weight: 0.25,
                modes: ModeIndices { n: Some(n), m: Some(m) },
            });
        }
    }
    SourceEnsemble::new(realizations).expect("static ensemble is valid")
}

/// Twin pulses through unbalanced interferometers; channels (E_l, E_r).
///
/// Both arms use [`phase_arm`]. The right arm's phase enters conjugated
/// through [`inner_conj`](crate::field::inner_conj) in the correlator, which
/// gives the `1 + cos(φ − ψ)` fringe.
pub fn franson_source(phi: f64, psi: f64) -> SourceEnsemble {
    single(vec![phase_arm(phi), phase_arm(psi)])
}

/// Dispersive pair: one member up in frequency by `s`, the other down, so
/// the long-arm phases become `φ(1 − s)` and `ψ(1 + s)`.
pub fn brendel_source(phi: f64, psi: f64, s: f64) -> Result<SourceEnsemble> {
    if !(s.abs() < 1.0) {
        return Err(Error::Domain("spread s must satisfy |s| < 1"));
    }
    Ok(franson_source(phi * (1.0 - s), psi * (1.0 + s)))
}

/// Path-length variant of the Franson source; same construction.
pub fn ghosh_mandel_source(delta1: f64, delta2: f64) -> SourceEnsemble {
    franson_source(delta1, delta2)
}

fn single(channels: Vec<FieldVec2>) -> SourceEnsemble {
    SourceEnsemble::new(vec![EmissionRealization { channels, weight: 1.0, modes: ModeIndices::default() }])
        .expect("single unit-weight realization is valid")
}
