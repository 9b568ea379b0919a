//! Seeded Monte Carlo over unit-mean exponential variates.
//!
//! Samples are split into fixed-size chunks. Chunk `k` draws from the ChaCha8
//! stream `k` of the configured seed, and per-chunk statistics are merged in
//! chunk order, so an estimate depends only on `(seed, n_samples, chunk)` and
//! never on how many threads ran the chunks.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{invalid, Result};
use crate::math;

pub const DEFAULT_CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub seed: u64,
    pub n_samples: usize,
    /// Samples per deterministic chunk.
    pub chunk: usize,
}

impl McConfig {
    pub fn new(seed: u64, n_samples: usize) -> Self {
        McConfig {
            seed,
            n_samples,
            chunk: DEFAULT_CHUNK,
        }
    }

    pub fn with_chunk(mut self, chunk: usize) -> Self {
        self.chunk = chunk;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(invalid("n_samples", "must be >= 1"));
        }
        if self.chunk == 0 {
            return Err(invalid("chunk", "must be >= 1"));
        }
        Ok(())
    }

    pub fn n_chunks(&self) -> usize {
        self.n_samples.div_ceil(self.chunk)
    }

    /// Sample count of chunk `k`.
    pub fn chunk_len(&self, k: usize) -> usize {
        let start = k * self.chunk;
        self.chunk.min(self.n_samples - start)
    }
}

/// Mixes a per-cell or per-trial index into a base seed (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A uniform/exponential source bound to one `(seed, stream)` pair.
#[derive(Debug, Clone)]
pub struct ExpSampler {
    rng: ChaCha8Rng,
}

impl ExpSampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        ExpSampler { rng }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unit-mean exponential by inversion; `u < 1` keeps the result finite.
    #[inline]
    pub fn exp(&mut self) -> f64 {
        -math::ln_1p(-self.uniform())
    }
}

/// Iterator over the Exp(1) stream of a configuration, in sample order.
pub fn sample_exp(config: McConfig) -> Result<impl Iterator<Item = f64>> {
    config.validate()?;
    Ok((0..config.n_chunks()).flat_map(move |k| {
        let mut s = ExpSampler::new(config.seed, k as u64);
        (0..config.chunk_len(k)).map(move |_| s.exp())
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`.
    pub stderr: f64,
    pub n: usize,
}

impl Estimate {
    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }
}

/// Running mean and sum of squared deviations (Welford), mergeable with
/// Chan's pairwise update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

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
        let nf = n as f64;
        self.mean += delta * other.n as f64 / nf;
        self.m2 += other.m2 + delta * delta * (self.n as f64) * (other.n as f64) / nf;
        self.n = n;
    }

    pub fn estimate(&self) -> Estimate {
        let stderr = if self.n > 1 {
            math::sqrt(self.m2 / (self.n - 1) as f64 / self.n as f64)
        } else {
            0.0
        };
        Estimate {
            mean: self.mean,
            stderr,
            n: self.n,
        }
    }
}

/// Executes independent chunk jobs and returns their results in chunk order.
pub trait ChunkRunner {
    fn run<R, F>(&self, n_chunks: usize, job: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send;
}

/// Runs chunks one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ChunkRunner for Sequential {
    fn run<R, F>(&self, n_chunks: usize, job: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        (0..n_chunks).map(job).collect()
    }
}

/// Estimates `N` expectations from the same draws. `f` receives a sampler
/// positioned at the current sample and may pull as many variates as it needs.
pub fn estimate_n<const N: usize, F, C>(config: McConfig, runner: &C, f: F) -> Result<[Estimate; N]>
where
    F: Fn(&mut ExpSampler) -> [f64; N] + Sync + Send,
    C: ChunkRunner,
{
    config.validate()?;
    let partials = runner.run(config.n_chunks(), |k| {
        let mut s = ExpSampler::new(config.seed, k as u64);
        let mut acc = [Accumulator::default(); N];
        for _ in 0..config.chunk_len(k) {
            let values = f(&mut s);
            for (a, v) in acc.iter_mut().zip(values) {
                a.push(v);
            }
        }
        acc
    });
    let mut total = [Accumulator::default(); N];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    Ok(total.map(|a| a.estimate()))
}

pub fn estimate_with<F, C>(config: McConfig, runner: &C, f: F) -> Result<Estimate>
where
    F: Fn(&mut ExpSampler) -> f64 + Sync + Send,
    C: ChunkRunner,
{
    let [e] = estimate_n(config, runner, |s| [f(s)])?;
    Ok(e)
}

/// Sequential [`estimate_with`].
pub fn estimate<F>(config: McConfig, f: F) -> Result<Estimate>
where
    F: Fn(&mut ExpSampler) -> f64 + Sync + Send,
{
    estimate_with(config, &Sequential, f)
}

/// All sampled values, in sample order.
pub fn sample_values<F, C>(config: McConfig, runner: &C, f: F) -> Result<Vec<f64>>
where
    F: Fn(&mut ExpSampler) -> f64 + Sync + Send,
    C: ChunkRunner,
{
    config.validate()?;
    let parts = runner.run(config.n_chunks(), |k| {
        let mut s = ExpSampler::new(config.seed, k as u64);
        (0..config.chunk_len(k)).map(|_| f(&mut s)).collect::<Vec<f64>>()
    });
    Ok(parts.concat())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcdfPoint {
    pub t: f64,
    /// `#{v <= t} / n`.
    pub cdf: f64,
    /// Binomial standard error of `cdf`.
    pub stderr: f64,
}

/// Right-continuous empirical CDF evaluated at each point of `grid`.
pub fn ecdf(values: &[f64], grid: &[f64]) -> Result<Vec<EcdfPoint>> {
    if values.is_empty() {
        return Err(invalid("values", "empirical CDF needs at least one value"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(invalid("values", "NaN in sample"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(grid
        .iter()
        .map(|&t| {
            let cdf = sorted.partition_point(|&v| v <= t) as f64 / n;
            EcdfPoint {
                t,
                cdf,
                stderr: math::sqrt(cdf * (1.0 - cdf) / n),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn exp_mean_and_tail() {
        let cfg = McConfig::new(2024, 1_000_000);
        let e = estimate(cfg, |s| s.exp()).unwrap();
        assert!((e.mean - 1.0).abs() < 0.004, "{e:?}");
        let tail = estimate(cfg, |s| (s.exp() > 2.0) as u8 as f64).unwrap();
        assert!(tail.covers(math::exp(-2.0), 3.0), "{tail:?}");
        let med = estimate(cfg, |s| (s.exp() < core::f64::consts::LN_2) as u8 as f64).unwrap();
        assert!(med.covers(0.5, 3.0), "{med:?}");
    }

    #[test]
    fn streams_are_deterministic() {
        let cfg = McConfig::new(7, 100);
        let first: Vec<f64> = sample_exp(cfg).unwrap().collect();
        let second: Vec<f64> = sample_exp(cfg).unwrap().collect();
        assert_eq!(first, second);
        let other: Vec<f64> = sample_exp(cfg.with_seed(8)).unwrap().collect();
        assert_ne!(first, other);
    }

    #[test]
    fn chunk_streams_differ() {
        let mut a = ExpSampler::new(1, 0);
        let mut b = ExpSampler::new(1, 1);
        assert_ne!(a.uniform(), b.uniform());
    }

    #[test]
    fn constant_function() {
        let e = estimate(McConfig::new(1, 1000), |_| 3.5).unwrap();
        assert_eq!((e.mean, e.stderr, e.n), (3.5, 0.0, 1000));
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(estimate(McConfig::new(1, 0), |s| s.exp()).is_err());
        assert!(ecdf(&[], &[0.0]).is_err());
    }

    #[test]
    fn stderr_matches_definition() {
        let cfg = McConfig::new(3, 5000).with_chunk(777);
        let values = sample_values(cfg, &Sequential, |s| s.exp()).unwrap();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        let e = estimate(cfg, |s| s.exp()).unwrap();
        assert!((e.mean - mean).abs() < 1e-12);
        assert!((e.stderr - math::sqrt(var / n)).abs() < 1e-12);
        assert_eq!(e.n, 5000);
    }

    #[test]
    fn ecdf_shape() {
        let pts = ecdf(&[3.0, 1.0, 2.0, 2.0], &[0.0, 1.0, 1.5, 2.0, f64::INFINITY]).unwrap();
        let cdf: Vec<f64> = pts.iter().map(|p| p.cdf).collect();
        assert_eq!(cdf, vec![0.0, 0.25, 0.25, 0.75, 1.0]);
    }

    #[test]
    fn coverage_of_three_sigma() {
        let mut covered = 0;
        for trial in 0..1000u64 {
            let cfg = McConfig::new(derive_seed(99, trial), 2000);
            let e = estimate(cfg, |s| s.exp()).unwrap();
            covered += e.covers(1.0, 3.0) as usize;
        }
        assert!(covered >= 990, "{covered}");
    }

    #[test]
    fn merge_is_exact_for_split_data() {
        let xs = [1.0, 4.0, 2.0, 8.0, 5.0, 7.0];
        let mut whole = Accumulator::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut left = Accumulator::default();
        let mut right = Accumulator::default();
        xs[..2].iter().for_each(|&x| left.push(x));
        xs[2..].iter().for_each(|&x| right.push(x));
        left.merge(&right);
        assert!((left.mean - whole.mean).abs() < 1e-14);
        assert!((left.m2 - whole.m2).abs() < 1e-12);
    }
}
