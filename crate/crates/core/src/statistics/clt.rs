use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::{observable_series, Observable};
use crate::error::{precondition, Result};
use crate::numerics::mean_std;
use crate::sampling::{map_samples, Streams};
use crate::skew::SkewSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CltReport {
    pub observable: Observable,
    pub n: usize,
    pub samples: usize,
    /// Pooled mean of `h`.
    pub mean: f64,
    /// Sample standard deviation of `(S_n - n·mean)/√n`.
    pub sigma: f64,
    /// Kolmogorov–Smirnov distance of the studentized sums from `N(0,1)`.
    pub ks: f64,
    pub degenerate: bool,
}

/// Kolmogorov–Smirnov distance of a sample from the standard normal.
pub fn ks_standard_normal(values: &[f64]) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &z)| {
            let f = normal.cdf(z);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Normality of the studentized Birkhoff sums of `h` at horizon `n`.
pub fn clt_check(
    sys: &SkewSystem,
    h: Observable,
    n: usize,
    samples: usize,
    burn_in: usize,
    streams: Streams,
) -> Result<CltReport> {
    if n == 0 || samples < 2 {
        return precondition("clt_check needs n > 0 and at least two samples");
    }
    let streams = streams.domain("clt");
    let sums: Vec<f64> = map_samples(samples, |i| {
        let mut rng = streams.rng(i as u64);
        observable_series(sys, &h, burn_in, n, &mut rng).iter().sum()
    });
    let mean = sums.iter().sum::<f64>() / (n * samples) as f64;
    let root = (n as f64).sqrt();
    let z: Vec<f64> = sums.iter().map(|s| (s - n as f64 * mean) / root).collect();
    let (zm, sigma) = mean_std(&z);
    let scale = mean.abs().max(1.0);
    let degenerate = !(sigma > 1e-12 * scale);
    let ks = if degenerate {
        f64::NAN
    } else {
        ks_standard_normal(&z.iter().map(|v| (v - zm) / sigma).collect::<Vec<_>>())
    };
    Ok(CltReport { observable: h, n, samples, mean, sigma, ks, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_degenerate() {
        let s = SkewSystem::reference(1e-2).unwrap();
        let r = clt_check(&s, Observable::Constant(1.0), 100, 50, 1000, Streams::new(1)).unwrap();
        assert!(r.degenerate);
    }

    #[test]
    fn ks_of_quantiles_is_small() {
        let normal = Normal::new(0.0, 1.0).unwrap();
        let v: Vec<f64> = (1..1000).map(|i| normal.inverse_cdf(i as f64 / 1000.0)).collect();
        assert!(ks_standard_normal(&v) < 2e-3);
        assert!(ks_standard_normal(&[10.0, 11.0]) > 0.99);
    }

    #[test]
    fn base_coordinate_control() {
        let s = SkewSystem::reference(1e-2).unwrap();
        let r = clt_check(&s, Observable::Theta, 2000, 1000, 1000, Streams::new(3)).unwrap();
        assert!(r.ks <= 0.05, "{r:?}");
    }
}
