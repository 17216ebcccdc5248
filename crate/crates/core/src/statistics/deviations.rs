use serde::Serialize;

use super::{observable_series, Observable};
use crate::error::{precondition, Result};
use crate::numerics::{mean_std, wilson, BAND_Z};
use crate::sampling::{map_samples, Streams};
use crate::skew::SkewSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationRow {
    pub n: usize,
    /// Fraction of samples with `|S_n/n - mean| > δ`.
    pub tail: f64,
    pub lower: f64,
    pub upper: f64,
    /// No sample deviated; only `upper` is informative.
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationTable {
    pub observable: Observable,
    pub delta: f64,
    /// Pooled mean of `h` over all samples at the largest `n`.
    pub mean: f64,
    /// Pooled standard deviation of single values of `h`.
    pub std: f64,
    pub rows: Vec<DeviationRow>,
}

impl DeviationTable {
    /// Tails in increasing `n` never increase.
    pub fn nonincreasing(&self) -> bool {
        self.sorted().windows(2).all(|w| w[1].tail <= w[0].tail)
    }

    /// Tails strictly decrease in `n`.
    pub fn strictly_decreasing(&self) -> bool {
        self.sorted().windows(2).all(|w| w[1].tail < w[0].tail)
    }

    fn sorted(&self) -> Vec<DeviationRow> {
        let mut r = self.rows.clone();
        r.sort_by_key(|r| r.n);
        r
    }
}

/// Deviation level, either fixed or as a multiple of the observable's
/// standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Threshold {
    Absolute(f64),
    StdMultiple(f64),
}

/// Empirical `P(|S_n/n - mean| > δ)` for each `n` in the grid.
pub fn large_deviations(
    sys: &SkewSystem,
    h: Observable,
    delta: Threshold,
    n_grid: &[usize],
    samples: usize,
    burn_in: usize,
    streams: Streams,
) -> Result<DeviationTable> {
    if samples == 0 || n_grid.is_empty() || n_grid.contains(&0) {
        return precondition("large_deviations needs samples > 0 and a grid of positive n");
    }
    let horizon = *n_grid.iter().max().unwrap_or(&1);
    let streams = streams.domain("deviations");
    // Per sample: the partial averages at each n and the mean square.
    let per: Vec<(Vec<f64>, f64)> = map_samples(samples, |i| {
        let mut rng = streams.rng(i as u64);
        let v = observable_series(sys, &h, burn_in, horizon, &mut rng);
        let mut prefix = Vec::with_capacity(n_grid.len());
        for &n in n_grid {
            prefix.push(v[..n].iter().sum::<f64>() / n as f64);
        }
        let q = v.iter().map(|x| x * x).sum::<f64>() / horizon as f64;
        (prefix, q)
    });
    let top = n_grid.iter().position(|&n| n == horizon).unwrap_or(0);
    let means: Vec<f64> = per.iter().map(|p| p.0[top]).collect();
    let (mean, _) = mean_std(&means);
    let second = per.iter().map(|p| p.1).sum::<f64>() / samples as f64;
    let std = (second - mean * mean).max(0.0).sqrt();
    let delta = match delta {
        Threshold::Absolute(d) => d,
        Threshold::StdMultiple(k) => k * std,
    };
    if !(delta > 0.0) {
        return precondition("large_deviations needs delta > 0");
    }
    let rows = n_grid
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let hits = per.iter().filter(|p| (p.0[j] - mean).abs() > delta).count() as u64;
            let (lower, upper) = wilson(hits, samples as u64, BAND_Z);
            DeviationRow { n, tail: hits as f64 / samples as f64, lower, upper, censored: hits == 0 }
        })
        .collect();
    Ok(DeviationTable { observable: h, delta, mean, std, rows })
}
