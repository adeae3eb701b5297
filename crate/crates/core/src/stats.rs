//! Means, blocking and ratio error propagation.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

/// A mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanError {
    pub mean: f64,
    pub stderr: f64,
}

pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        return f64::NAN;
    }
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance.
pub fn variance(x: &[f64]) -> f64 {
    covariance(x, x)
}

pub fn covariance(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return f64::NAN;
    }
    let (mx, my) = (mean(x), mean(y));
    x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (n - 1) as f64
}

/// Means of `n_blocks` contiguous blocks; trailing samples that do not fill
/// a block are dropped.
pub fn block_means(x: &[f64], n_blocks: usize) -> Vec<f64> {
    let len = x.len() / n_blocks.max(1);
    if len == 0 {
        return Vec::new();
    }
    x.chunks_exact(len).take(n_blocks).map(mean).collect()
}

/// Mean and standard error of equally weighted independent units.
pub fn unit_mean(units: &[f64]) -> MeanError {
    let n = units.len() as f64;
    MeanError { mean: mean(units), stderr: (variance(units) / n).sqrt() }
}

/// `mean(num) / mean(den)` over paired independent units, with the
/// delta-method standard error including their covariance.
pub fn ratio(num: &[f64], den: &[f64]) -> MeanError {
    let n = num.len() as f64;
    let (a, b) = (mean(num), mean(den));
    let r = a / b;
    let var = (variance(num) - 2.0 * r * covariance(num, den) + r * r * variance(den)) / (b * b * n);
    MeanError { mean: r, stderr: var.max(0.0).sqrt() }
}

/// `a / b` for independent estimates, relative errors added in quadrature.
pub fn independent_ratio(a: MeanError, b: MeanError) -> MeanError {
    let r = a.mean / b.mean;
    let rel = (a.stderr / a.mean).powi(2) + (b.stderr / b.mean).powi(2);
    MeanError { mean: r, stderr: r.abs() * rel.sqrt() }
}

/// Chains at or above this count use across-chain scatter for errors.
pub const MIN_CHAINS_FOR_SCATTER: usize = 8;

/// Running block sums for one chain. Samples are assigned to blocks by
/// their step index, so rejected samples leave block boundaries unchanged.
#[derive(Debug, Clone)]
pub struct Blocks {
    steps: usize,
    sums: Vec<f64>,
    counts: Vec<u64>,
}

impl Blocks {
    pub fn new(n_blocks: usize, steps: usize) -> Self {
        Blocks { steps, sums: alloc::vec![0.0; n_blocks], counts: alloc::vec![0; n_blocks] }
    }

    #[inline]
    pub fn push(&mut self, step: usize, value: f64) {
        let b = step * self.sums.len() / self.steps;
        self.sums[b] += value;
        self.counts[b] += 1;
    }

    pub fn count(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Means of the non-empty blocks.
    pub fn means(&self) -> Vec<f64> {
        self.sums.iter().zip(&self.counts).filter(|(_, &c)| c > 0).map(|(s, &c)| s / c as f64).collect()
    }
}

/// Per-chain block means reduced to the units used for error estimates:
/// chain means when there are enough chains, otherwise all blocks pooled.
pub fn error_units(chains: &[Vec<f64>]) -> Vec<f64> {
    if chains.len() >= MIN_CHAINS_FOR_SCATTER {
        chains.iter().map(|c| mean(c)).collect()
    } else {
        chains.iter().flatten().copied().collect()
    }
}

/// Intercept weights `c_k` of an ordinary least-squares line in `t_k`,
/// so the intercept is `sum c_k y_k`.
pub fn intercept_weights(t: &[f64]) -> Vec<f64> {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|v| (v - tm) * (v - tm)).sum();
    t.iter().map(|v| 1.0 / n - tm * (v - tm) / stt).collect()
}
