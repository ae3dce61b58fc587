//! Repeated-run simulation: each trial postselects with the protocol's
//! probability and, when accepted, draws one probe momentum from the
//! conditional distribution.
//!
//! Trial `i` draws from its own ChaCha8 stream (`set_stream(i)`), and trials
//! are reduced in fixed-size chunks in index order, so results do not depend
//! on how chunks are scheduled across threads.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::protocol::{self, Kicks, SourceState};
use crate::wavepacket::{GridSpec, Wavepacket};
#[allow(unused_imports)]
use num_traits::Float as _;

/// Trials per reduction chunk.
pub const CHUNK_TRIALS: u64 = 16_384;
pub const DEFAULT_HISTOGRAM_BINS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub pre: SourceState,
    pub post: SourceState,
    pub probe: Wavepacket,
    pub kicks: Kicks,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub trials: u64,
    pub seed: u64,
    pub scenario: Scenario,
    pub histogram_bins: usize,
}

impl RunConfig {
    pub fn new(scenario: Scenario, trials: u64, seed: u64) -> Self {
        RunConfig { trials, seed, scenario, histogram_bins: DEFAULT_HISTOGRAM_BINS }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn bin_edges(&self, bin: usize) -> (f64, f64) {
        let w = (self.hi - self.lo) / self.counts.len() as f64;
        (self.lo + bin as f64 * w, self.lo + (bin + 1) as f64 * w)
    }

    fn bin_of(&self, x: f64) -> usize {
        let n = self.counts.len();
        let f = (x - self.lo) / (self.hi - self.lo) * n as f64;
        if f <= 0.0 {
            0
        } else {
            (f as usize).min(n - 1)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub trials: u64,
    pub accepted: u64,
    pub acceptance_rate: f64,
    /// `None` when nothing was accepted.
    pub mean_kick_estimate: Option<f64>,
    /// Sample standard deviation; `None` below two accepted samples.
    pub sample_std: Option<f64>,
    /// `sample_std / √accepted`; `None` below two accepted samples.
    pub std_error: Option<f64>,
    pub histogram: Histogram,
}

/// Partial sums over one chunk of trials (Welford form).
#[derive(Debug, Clone, PartialEq)]
pub struct Accumulator {
    trials: u64,
    accepted: u64,
    mean: f64,
    m2: f64,
    counts: Vec<u64>,
}

impl Accumulator {
    fn new(bins: usize) -> Self {
        Accumulator { trials: 0, accepted: 0, mean: 0.0, m2: 0.0, counts: vec![0; bins] }
    }

    fn push(&mut self, x: f64) {
        self.accepted += 1;
        let d = x - self.mean;
        self.mean += d / self.accepted as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, other: &Accumulator) {
        self.trials += other.trials;
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        if other.accepted == 0 {
            return;
        }
        let n = self.accepted + other.accepted;
        let d = other.mean - self.mean;
        let w = other.accepted as f64 / n as f64;
        self.mean += d * w;
        self.m2 += other.m2 + d * d * self.accepted as f64 * w;
        self.accepted = n;
    }
}

/// A scenario prepared for sampling: postselection probability plus the
/// inverse-CDF table of the conditional momentum density.
#[derive(Debug, Clone)]
pub struct Sampler {
    trials: u64,
    probability: f64,
    exact_mean: f64,
    grid: GridSpec,
    cdf: Vec<f64>,
    histogram: Histogram,
    rng: ChaCha8Rng,
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl Sampler {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        if cfg.trials < 1 {
            return Err(Error::InvalidArgument("need at least one trial"));
        }
        if cfg.histogram_bins < 1 {
            return Err(Error::InvalidArgument("histogram needs at least one bin"));
        }
        let s = &cfg.scenario;
        let result = protocol::run(&s.pre, &s.probe, &s.kicks, &s.post)?;
        let grid = result.conditional.default_grid();
        let sampled = result.conditional.sample(&grid)?;
        let density: Vec<f64> = sampled.amplitudes().iter().map(|a| a.norm_sqr()).collect();
        // cumulative trapezoid mass up to each node
        let mut cdf = Vec::with_capacity(density.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in density.windows(2) {
            acc += 0.5 * (w[0] + w[1]);
            cdf.push(acc);
        }
        if !(acc > 0.0 && acc.is_finite()) {
            return Err(Error::Domain("conditional density vanishes on its grid"));
        }
        let hi = grid.node(grid.n - 1);
        Ok(Sampler {
            trials: cfg.trials,
            probability: result.probability,
            exact_mean: result.mean_kick,
            grid,
            cdf,
            histogram: Histogram { lo: grid.p_min, hi, counts: vec![0; cfg.histogram_bins] },
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        })
    }

    /// Exact postselection probability.
    pub fn probability(&self) -> f64 {
        self.probability
    }

    /// Exact conditional mean momentum.
    pub fn exact_mean(&self) -> f64 {
        self.exact_mean
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn histogram_layout(&self) -> &Histogram {
        &self.histogram
    }

    /// Inverse CDF, linear within each grid cell.
    pub fn quantile(&self, u: f64) -> f64 {
        let total = *self.cdf.last().unwrap();
        let target = u * total;
        let k = self.cdf.partition_point(|&c| c <= target).clamp(1, self.cdf.len() - 1) - 1;
        let mass = self.cdf[k + 1] - self.cdf[k];
        let frac = if mass > 0.0 { ((target - self.cdf[k]) / mass).clamp(0.0, 1.0) } else { 0.5 };
        self.grid.node(k) + frac * self.grid.spacing()
    }

    /// Outcome of trial `index`: the sampled momentum if postselection
    /// succeeded.
    pub fn trial(&self, index: u64) -> Option<f64> {
        let mut rng = self.rng.clone();
        rng.set_stream(index);
        if unit_f64(&mut rng) >= self.probability {
            return None;
        }
        Some(self.quantile(unit_f64(&mut rng)))
    }

    pub fn chunk_count(&self) -> u64 {
        self.trials.div_ceil(CHUNK_TRIALS)
    }

    pub fn run_chunk(&self, chunk: u64) -> Accumulator {
        let start = chunk * CHUNK_TRIALS;
        let end = (start + CHUNK_TRIALS).min(self.trials);
        let mut acc = Accumulator::new(self.histogram.counts.len());
        acc.trials = end.saturating_sub(start);
        for i in start..end {
            if let Some(p) = self.trial(i) {
                acc.push(p);
                acc.counts[self.histogram.bin_of(p)] += 1;
            }
        }
        acc
    }

    /// Reduces chunk results, which must be supplied in chunk order.
    pub fn finish(&self, chunks: impl IntoIterator<Item = Accumulator>) -> EnsembleStats {
        let mut total = Accumulator::new(self.histogram.counts.len());
        for c in chunks {
            total.merge(&c);
        }
        let n = total.accepted;
        let sample_std = (n >= 2).then(|| (total.m2 / (n - 1) as f64).max(0.0).sqrt());
        EnsembleStats {
            trials: total.trials,
            accepted: n,
            acceptance_rate: n as f64 / total.trials as f64,
            mean_kick_estimate: (n >= 1).then_some(total.mean),
            sample_std,
            std_error: sample_std.map(|s| s / (n as f64).sqrt()),
            histogram: Histogram { counts: total.counts, ..self.histogram.clone() },
        }
    }

    pub fn run_serial(&self) -> EnsembleStats {
        self.finish((0..self.chunk_count()).map(|c| self.run_chunk(c)))
    }
}

pub fn run_ensemble(cfg: &RunConfig) -> Result<EnsembleStats> {
    Ok(Sampler::new(cfg)?.run_serial())
}

/// Total (pre-postselection) trials needed so the accepted-sample standard
/// error resolves `delta_ef` at `k_sigma`, using Δp as the per-sample spread.
pub fn required_trials(delta_ef: f64, delta_p: f64, p_ps: f64, k_sigma: f64) -> Result<u64> {
    if delta_ef == 0.0 || !delta_ef.is_finite() {
        return Err(Error::InvalidArgument("effective kick must be non-zero"));
    }
    if !(p_ps > 0.0 && p_ps <= 1.0) {
        return Err(Error::InvalidArgument("postselection probability must lie in (0, 1]"));
    }
    if !(k_sigma > 0.0 && delta_p > 0.0) {
        return Err(Error::InvalidArgument("significance and momentum spread must be positive"));
    }
    let r = delta_p / delta_ef;
    let raw = k_sigma * k_sigma * r * r / p_ps;
    // strip last-ulp noise so exact products do not round up
    let n = (raw * (1.0 - 1e-12)).ceil();
    if !(n < u64::MAX as f64) {
        return Err(Error::InvalidArgument("required trial count overflows"));
    }
    Ok(n as u64)
}

/// Runs `cfg` twice and reports whether both results are bit-identical.
pub fn reproducibility_check(cfg: &RunConfig) -> Result<bool> {
    Ok(run_ensemble(cfg)? == run_ensemble(cfg)?)
}
