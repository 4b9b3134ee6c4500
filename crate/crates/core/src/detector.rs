//! Stochastic photodetection: Poisson event streams, coincidence-window
//! counting and a Monte Carlo estimator of the analytic coincidence rate.
//!
//! Randomness comes from ChaCha8 keyed by the run seed, with the stream
//! number selecting an independent substream per detector or per block of
//! trials. Results depend only on `(inputs, seed)`, never on how blocks are
//! scheduled across threads.

use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::correlator::{AmplitudeTable, AnalyzerSettings};
use crate::error::{Error, Result};
use crate::experiments::ExperimentPreset;

/// Trials per independently seeded block.
pub const MC_BLOCK_TRIALS: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed(pub u64);

impl RngSeed {
    fn rng(self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventStream {
    pub detector: usize,
    times: Vec<f64>,
    duration: f64,
}

impl EventStream {
    /// Sorted event times within `[0, duration]`.
    pub fn new(detector: usize, mut times: Vec<f64>, duration: f64) -> Result<Self> {
        if !(duration > 0.0) {
            return Err(Error::Domain("stream duration must be positive"));
        }
        if times.iter().any(|t| !(0.0..=duration).contains(t)) {
            return Err(Error::Domain("event time outside [0, duration]"));
        }
        times.sort_by(f64::total_cmp);
        Ok(EventStream { detector, times, duration })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceWindow(f64);

impl CoincidenceWindow {
    pub fn new(width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::Domain("coincidence window must be positive"));
        }
        Ok(CoincidenceWindow(width))
    }

    pub fn width(&self) -> f64 {
        self.0
    }
}

/// Homogeneous Poisson process of rate `intensity` on `[0, duration]`.
/// The detector index selects the random substream.
pub fn poisson_stream(detector: usize, intensity: f64, duration: f64, seed: RngSeed) -> Result<EventStream> {
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return Err(Error::Domain("intensity must be nonnegative"));
    }
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::Domain("stream duration must be positive"));
    }
    let mut times = Vec::new();
    if intensity > 0.0 {
        let gaps = Exp::new(intensity).map_err(|_| Error::Domain("invalid exponential rate"))?;
        let mut rng = seed.rng(detector as u64);
        let mut t = 0.0;
        loop {
            t += gaps.sample(&mut rng);
            if t > duration {
                break;
            }
            times.push(t);
        }
    }
    Ok(EventStream { detector, times, duration })
}

/// Greedy coincidence matching: walk the streams in time order; whenever the
/// current head events of all streams lie within the window, count one
/// coincidence and consume them, otherwise drop the earliest head.
pub fn coincidence_count(streams: &[EventStream], window: CoincidenceWindow) -> Result<u64> {
    if streams.len() < 2 {
        return Err(Error::Arity { expected: 2, found: streams.len(), what: "event streams" });
    }
    let duration = streams[0].duration;
    if streams.iter().any(|s| s.duration != duration) {
        return Err(Error::Domain("event streams have different durations"));
    }
    let mut heads = alloc::vec![0usize; streams.len()];
    let mut count = 0;
    loop {
        let mut earliest = (f64::INFINITY, 0);
        let mut latest = f64::NEG_INFINITY;
        for (k, (s, &h)) in streams.iter().zip(&heads).enumerate() {
            let Some(&t) = s.times.get(h) else { return Ok(count) };
            if t < earliest.0 {
                earliest = (t, k);
            }
            latest = latest.max(t);
        }
        if latest - earliest.0 <= window.0 {
            count += 1;
            heads.iter_mut().for_each(|h| *h += 1);
        } else {
            heads[earliest.1] += 1;
        }
    }
}

/// Running sums of per-trial estimates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrialStats {
    pub trials: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl TrialStats {
    fn push(&mut self, x: f64) {
        self.trials += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(self, other: TrialStats) -> TrialStats {
        TrialStats { trials: self.trials + other.trials, sum: self.sum + other.sum, sum_sq: self.sum_sq + other.sum_sq }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    pub trials: u64,
}

impl McEstimate {
    /// Folds block statistics in the order given.
    pub fn from_blocks(blocks: impl IntoIterator<Item = TrialStats>) -> Result<Self> {
        let s = blocks.into_iter().fold(TrialStats::default(), TrialStats::merge);
        if s.trials == 0 {
            return Err(Error::Config("Monte Carlo needs at least one trial"));
        }
        let n = s.trials as f64;
        let mean = s.sum / n;
        let stderr = if s.trials > 1 {
            let var = ((s.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
            libm::sqrt(var / n)
        } else {
            0.0
        };
        Ok(McEstimate { mean, stderr, trials: s.trials })
    }
}

/// Precomputed amplitudes and the cumulative weights used to sample realizations.
#[derive(Debug, Clone)]
pub struct McSampler {
    table: AmplitudeTable,
    cumulative: Vec<f64>,
}

impl McSampler {
    pub fn new(preset: &ExperimentPreset, settings: &AnalyzerSettings) -> Result<Self> {
        let table = AmplitudeTable::build(&preset.source, &preset.network, settings)?;
        let mut acc = 0.0;
        let cumulative = table
            .weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(McSampler { table, cumulative })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        if self.cumulative.len() == 1 {
            return 0;
        }
        let u = rng.random::<f64>() * self.cumulative[self.cumulative.len() - 1];
        self.cumulative.iter().position(|&c| u < c).unwrap_or(self.cumulative.len() - 1)
    }

    /// One trial: two independently emitted realizations `r`, `r'`; the
    /// estimate `Σ_g Re(conj(a_g(r)) a_g(r'))` is unbiased for `Σ_g |⟨a_g⟩|²`.
    fn trial(&self, rng: &mut ChaCha8Rng) -> f64 {
        let a = &self.table.amplitudes[self.draw(rng)];
        let b = &self.table.amplitudes[self.draw(rng)];
        a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
    }

    /// Statistics for block `block` of a run of `trials` trials.
    pub fn block(&self, seed: RngSeed, block: u64, trials: u64) -> TrialStats {
        let start = block * MC_BLOCK_TRIALS;
        let n = trials.saturating_sub(start).min(MC_BLOCK_TRIALS);
        let mut rng = seed.rng(block);
        let mut stats = TrialStats::default();
        for _ in 0..n {
            stats.push(self.trial(&mut rng));
        }
        stats
    }
}

pub fn block_count(trials: u64) -> u64 {
    trials.div_ceil(MC_BLOCK_TRIALS)
}

/// Monte Carlo estimate of the preset's raw coincidence rate.
pub fn mc_estimate(
    preset: &ExperimentPreset,
    settings: &AnalyzerSettings,
    trials: u64,
    seed: RngSeed,
) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::Config("Monte Carlo needs at least one trial"));
    }
    let sampler = McSampler::new(preset, settings)?;
    McEstimate::from_blocks((0..block_count(trials)).map(|b| sampler.block(seed, b, trials)))
}
