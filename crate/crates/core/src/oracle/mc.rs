//! Exact Monte Carlo of the physical model.
//!
//! Samples are split into blocks of [`BLOCK_SIZE`]; block `i` draws from
//! substream `i` of the seed and the block statistics are merged in block
//! order, so any executor that runs [`run_block`] and merges the results in
//! index order reproduces the sequential estimate bit for bit.

use crate::channel::{gain_pmf, sample_power_gain, GainPmf, LinkState, SystemConfig};
use crate::error::{domain, Result};
use crate::sampling::{substream, uniform, Stream};
use crate::warden::{detection_error_star, RealizationInputs};

/// Samples per block.
pub const BLOCK_SIZE: u64 = 1 << 16;

/// Monte Carlo estimate of a mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Sample mean.
    pub mean: f64,
    /// Standard error, sample standard deviation over `√n`.
    pub stderr: f64,
    /// Number of samples.
    pub n_samples: u64,
    /// Master seed.
    pub seed: u64,
}

/// Streaming mean and variance (Welford), mergeable (Chan et al.).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    /// Adds one observation.
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Folds `other` into `self`; the result depends on the merge order.
    pub fn merge(&mut self, other: &Accumulator) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let (na, nb, nf) = (self.n as f64, other.n as f64, n as f64);
        self.mean += delta * nb / nf;
        self.m2 += other.m2 + delta * delta * na * nb / nf;
        self.n = n;
    }

    /// Observation count.
    pub fn count(&self) -> u64 {
        self.n
    }

    /// Final estimate.
    pub fn estimate(&self, seed: u64) -> McEstimate {
        let stderr = if self.n > 1 {
            let var = self.m2 / (self.n - 1) as f64;
            libm::sqrt(var / self.n as f64)
        } else {
            0.0
        };
        McEstimate { mean: self.mean, stderr, n_samples: self.n, seed }
    }
}

/// Quantity a Monte Carlo run estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum McMetric {
    /// Willie's minimum detection error.
    Detection,
    /// Alice-Bob outage indicator at the given target rate.
    Outage {
        /// Target rate, bits per channel use.
        rate: f64,
    },
    /// `log₂(1 + γ_ab)`.
    Capacity,
}

impl McMetric {
    /// Rejects configurations and arguments the metric cannot be sampled at.
    pub fn check(&self, cfg: &SystemConfig) -> Result<()> {
        cfg.validate()?;
        match *self {
            McMetric::Detection if !(cfg.pj_max > 0.0) => Err(domain("P_J^max", cfg.pj_max)),
            McMetric::Outage { rate } if !(rate > 0.0 && rate.is_finite()) => Err(domain("target rate", rate)),
            _ => Ok(()),
        }
    }
}

/// Number of blocks covering `n` samples.
pub fn block_count(n: u64) -> u64 {
    n.div_ceil(BLOCK_SIZE)
}

/// Runs block `index` of an `n`-sample plan. The configuration must have
/// passed [`McMetric::check`].
pub fn run_block(cfg: &SystemConfig, metric: McMetric, n: u64, seed: u64, index: u64) -> Accumulator {
    let start = index * BLOCK_SIZE;
    let len = n.saturating_sub(start).min(BLOCK_SIZE);
    let mut rng = substream(seed, index);
    match metric {
        McMetric::Detection => {
            let m = Model::detection(cfg);
            fill(len, &mut rng, |r| m.detection_sample(r))
        }
        McMetric::Outage { rate } => {
            let m = Model::link(cfg);
            let gamma_th = libm::exp2(rate) - 1.0;
            fill(len, &mut rng, |r| if m.sinr(r) < gamma_th { 1.0 } else { 0.0 })
        }
        McMetric::Capacity => {
            let m = Model::link(cfg);
            fill(len, &mut rng, |r| libm::log2(1.0 + m.sinr(r)))
        }
    }
}

fn fill(len: u64, rng: &mut Stream, mut draw: impl FnMut(&mut Stream) -> f64) -> Accumulator {
    let mut acc = Accumulator::default();
    for _ in 0..len {
        acc.push(draw(rng));
    }
    acc
}

/// Sequential estimator; parallel executors reproduce it via [`run_block`].
pub fn estimate(cfg: &SystemConfig, metric: McMetric, n: u64, seed: u64) -> Result<McEstimate> {
    metric.check(cfg)?;
    if n == 0 {
        return Err(domain("sample count", 0.0));
    }
    let mut total = Accumulator::default();
    for i in 0..block_count(n) {
        total.merge(&run_block(cfg, metric, n, seed, i));
    }
    Ok(total.estimate(seed))
}

/// Exact-model estimate of `E[P*_{e,w}]`.
pub fn mc_expected_detection_error(cfg: &SystemConfig, n: u64, seed: u64) -> Result<McEstimate> {
    estimate(cfg, McMetric::Detection, n, seed)
}

/// Exact-model estimate of the outage probability at target rate `rate`.
pub fn mc_outage(cfg: &SystemConfig, rate: f64, n: u64, seed: u64) -> Result<McEstimate> {
    estimate(cfg, McMetric::Outage { rate }, n, seed)
}

/// Exact-model estimate of the ergodic capacity.
pub fn mc_ergodic_capacity(cfg: &SystemConfig, n: u64, seed: u64) -> Result<McEstimate> {
    estimate(cfg, McMetric::Capacity, n, seed)
}

/// Per-run constants, hoisted out of the sampling loop.
struct Model {
    pa: f64,
    pj_max: f64,
    noise: f64,
    states: [(LinkState, f64, f64); 2],
    nu: [u32; 2],
    gains: [GainPmf; 3],
}

impl Model {
    fn detection(cfg: &SystemConfig) -> Self {
        Self::new(cfg, cfg.d_aw, cfg.sigma2_w, [cfg.jammer_gain_at_willie(), cfg.signal_gain_at_willie(), GainPmf::deterministic(1.0)])
    }

    fn link(cfg: &SystemConfig) -> Self {
        Self::new(cfg, cfg.d_ab, cfg.sigma2_b, [gain_pmf(&cfg.alice_first), gain_pmf(&cfg.bob), cfg.jammer_gain_at_bob()])
    }

    fn new(cfg: &SystemConfig, d: f64, noise: f64, gains: [GainPmf; 3]) -> Self {
        // Inputs were validated; the fallback is unreachable.
        let states = cfg.link_states(d).unwrap_or([(LinkState::Los, 1.0, 0.0), (LinkState::Nlos, 0.0, 0.0)]);
        let nu = [cfg.fading.nu(states[0].0), cfg.fading.nu(states[1].0)];
        Self { pa: cfg.pa, pj_max: cfg.pj_max, noise, states, nu, gains }
    }

    fn draw_state(&self, rng: &mut Stream) -> (u32, f64) {
        if uniform(rng) < self.states[0].1 {
            (self.nu[0], self.states[0].2)
        } else {
            (self.nu[1], self.states[1].2)
        }
    }

    fn detection_sample(&self, rng: &mut Stream) -> f64 {
        let (nu, loss) = self.draw_state(rng);
        let g_s = self.gains[0].draw(uniform(rng));
        let g_f = self.gains[1].draw(uniform(rng));
        let h_f = sample_power_gain(nu, rng);
        let h_s = sample_power_gain(nu, rng);
        let r = RealizationInputs {
            signal: self.pa * g_f * loss * h_f,
            jamming: self.pj_max * g_s * loss * h_s,
            noise: self.noise,
        };
        match detection_error_star(&r) {
            Ok(d) => d.p_e_star,
            // A zero jamming draw (h_s underflow) leaves Willie error free.
            Err(_) => 0.0,
        }
    }

    fn sinr(&self, rng: &mut Stream) -> f64 {
        let (nu, loss) = self.draw_state(rng);
        let g_f = self.gains[0].draw(uniform(rng));
        let g_b = self.gains[1].draw(uniform(rng));
        let g_j = self.gains[2].draw(uniform(rng));
        let h_f = sample_power_gain(nu, rng);
        let h_s = sample_power_gain(nu, rng);
        let pj = self.pj_max * uniform(rng);
        self.pa * g_f * g_b * loss * h_f / (pj * g_j * g_b * loss * h_s + self.noise)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_matches_two_pass() {
        let xs = [1.0, 4.0, 2.5, -3.0, 7.25, 0.5, 0.0];
        let mut a = Accumulator::default();
        xs.iter().for_each(|&x| a.push(x));
        let mean = xs.iter().sum::<f64>() / 7.0;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 6.0;
        let e = a.estimate(0);
        assert!((e.mean - mean).abs() < 1e-14);
        assert!((e.stderr - libm::sqrt(var / 7.0)).abs() < 1e-14);

        let (mut l, mut r) = (Accumulator::default(), Accumulator::default());
        xs[..3].iter().for_each(|&x| l.push(x));
        xs[3..].iter().for_each(|&x| r.push(x));
        l.merge(&r);
        assert!((l.estimate(0).mean - mean).abs() < 1e-14);
        assert!((l.estimate(0).stderr - e.stderr).abs() < 1e-14);
    }

    #[test]
    fn block_plan() {
        assert_eq!(block_count(1), 1);
        assert_eq!(block_count(BLOCK_SIZE), 1);
        assert_eq!(block_count(BLOCK_SIZE + 1), 2);
        let cfg = SystemConfig::benchmark();
        let last = run_block(&cfg, McMetric::Capacity, BLOCK_SIZE + 5, 1, 1);
        assert_eq!(last.count(), 5);
    }

    #[test]
    fn single_sample_is_reproducible() {
        let cfg = SystemConfig::benchmark();
        let a = mc_expected_detection_error(&cfg, 1, 42).unwrap();
        let b = mc_expected_detection_error(&cfg, 1, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.stderr, 0.0);
        assert!(mc_outage(&cfg, 0.0, 10, 1).is_err());
        assert!(mc_ergodic_capacity(&cfg, 0, 1).is_err());
    }
}
