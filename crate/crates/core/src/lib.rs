//! Classical second-order coherence engine for EPR-B style coincidence experiments.
//!
//! Sources emit weighted ensembles of two-component complex fields, optical
//! networks route them through polarizers and beam splitters to analyzers,
//! and the correlator turns the ensemble into a fourfold (or twofold)
//! coincidence rate. A stochastic detector layer checks that Poisson
//! photocounting converges to the analytic numbers.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
#![deny(missing_debug_implementations)]
#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

extern crate alloc;

pub mod correlator;
pub mod detector;
pub mod error;
pub mod experiments;
pub mod field;
pub mod quadrature;
pub mod sources;

pub use correlator::{
    coincidence_amplitude, detector_intensities, e2_direct_oracle, ensemble_rate, franson_rate, normalize,
    spread_average, AnalyzerSettings, ChannelTerm, CoincidenceResult, DetectorInput, Normalization, OpticalNetwork,
    PairingAlternative, Summation,
};
pub use error::{Error, Result};
pub use field::{apply, inner_conj, phase_arm, polarizer, project, Cplx, FieldVec2, Mat2};
pub use sources::{EmissionRealization, ModeIndices, SourceEnsemble, SpreadSpec};
