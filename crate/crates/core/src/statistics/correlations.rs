use serde::Serialize;

use super::Observable;
use crate::error::{precondition, Result};
use crate::numerics::{fit_line, LineFit};
use crate::sampling::{map_samples, Streams};
use crate::skew::SkewSystem;

/// Level that coordinate correlations must cross.
pub const CORRELATION_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationTable {
    pub h1: Observable,
    pub h2: Observable,
    /// `0..=max_lag`.
    pub lags: Vec<usize>,
    pub correlation: Vec<f64>,
    /// Pooled covariance at lag 0.
    pub covariance: f64,
    /// `log|corr| ≈ log C - τ √lag` over lags ≥ 1 with nonzero correlation.
    pub fit: Option<LineFit>,
    pub tau: Option<f64>,
    pub prefactor: Option<f64>,
}

impl CorrelationTable {
    /// First lag `k ≥ 1` with `|corr(k)| < threshold`.
    pub fn crossing_lag(&self, threshold: f64) -> Option<usize> {
        self.lags.iter().zip(&self.correlation).find(|(k, c)| **k >= 1 && c.abs() < threshold).map(|(k, _)| *k)
    }

    /// True if `|corr|` grows at every lag after `from`.
    pub fn grows_monotonically_after(&self, from: usize) -> bool {
        let tail: Vec<f64> = self.correlation.iter().skip(from).map(|c| c.abs()).collect();
        tail.len() >= 2 && tail.windows(2).all(|w| w[1] > w[0])
    }
}

/// Pooled stationary correlations of `h1(z_j)` and `h2(z_{j+k})` from
/// burned-in orbits of length `n + max_lag`.
#[allow(clippy::too_many_arguments)]
pub fn correlation_decay(
    sys: &SkewSystem,
    h1: Observable,
    h2: Observable,
    max_lag: usize,
    n: usize,
    samples: usize,
    burn_in: usize,
    streams: Streams,
) -> Result<CorrelationTable> {
    if n < 2 || samples == 0 {
        return precondition("correlation_decay needs n >= 2 and samples > 0");
    }
    let streams = streams.domain("correlations");
    let len = n + max_lag;
    // Per sample: Σh1, Σh1², Σh2, Σh2² over the first n points, and the lag
    // sums Σ h1(z_j) h2(z_{j+k}).
    let per: Vec<(f64, f64, f64, f64, Vec<f64>)> = map_samples(samples, |i| {
        let mut rng = streams.rng(i as u64);
        let mut a = Vec::with_capacity(len);
        let mut b = Vec::with_capacity(len);
        let (mut t, mut x) = super::burned_start(sys, burn_in, &mut rng);
        for _ in 0..len {
            a.push(h1.eval(t, x));
            b.push(h2.eval(t, x));
            (t, x) = sys.step_sampled(t, x, &mut rng);
        }
        let s1: f64 = a[..n].iter().sum();
        let q1: f64 = a[..n].iter().map(|v| v * v).sum();
        let s2: f64 = b[..n].iter().sum();
        let q2: f64 = b[..n].iter().map(|v| v * v).sum();
        let lag: Vec<f64> = (0..=max_lag).map(|k| (0..n).map(|j| a[j] * b[j + k]).sum()).collect();
        (s1, q1, s2, q2, lag)
    });
    let total = (n * samples) as f64;
    let (mut s1, mut q1, mut s2, mut q2) = (0.0, 0.0, 0.0, 0.0);
    let mut lag = vec![0.0; max_lag + 1];
    for p in &per {
        s1 += p.0;
        q1 += p.1;
        s2 += p.2;
        q2 += p.3;
        for (l, v) in lag.iter_mut().zip(&p.4) {
            *l += v;
        }
    }
    let (m1, m2) = (s1 / total, s2 / total);
    let v1 = (q1 / total - m1 * m1).max(0.0);
    let v2 = (q2 / total - m2 * m2).max(0.0);
    let scale = (v1 * v2).sqrt();
    let degenerate = !(scale > 1e-300) || v1 <= 1e-14 * (q1 / total).max(1e-300) || v2 <= 1e-14 * (q2 / total).max(1e-300);
    let cov: Vec<f64> = lag.iter().map(|l| l / total - m1 * m2).collect();
    let correlation: Vec<f64> = if degenerate { vec![0.0; max_lag + 1] } else { cov.iter().map(|c| c / scale).collect() };
    let (xs, ys): (Vec<f64>, Vec<f64>) = correlation
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| c.abs() > 0.0)
        .map(|(k, c)| ((k as f64).sqrt(), c.abs().ln()))
        .unzip();
    let fit = fit_line(&xs, &ys);
    Ok(CorrelationTable {
        h1,
        h2,
        lags: (0..=max_lag).collect(),
        covariance: if degenerate { 0.0 } else { cov[0] },
        tau: fit.map(|f| -f.slope),
        prefactor: fit.map(|f| f.intercept.exp()),
        fit,
        correlation,
    })
}

/// Lag-0 covariance of a single series.
#[cfg(test)]
fn series_cov(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    v.iter().map(|x| x * x).sum::<f64>() / n - m * m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statistics::observable_series;

    #[test]
    fn lag_zero_is_covariance() {
        let s = SkewSystem::reference(1e-2).unwrap();
        let t = correlation_decay(&s, Observable::X, Observable::X, 3, 500, 1, 1000, Streams::new(1)).unwrap();
        let mut rng = Streams::new(1).domain("correlations").rng(0);
        let v = observable_series(&s, &Observable::X, 1000, 500, &mut rng);
        assert!((t.covariance - series_cov(&v)).abs() < 1e-12);
        assert!(t.covariance > 0.0);
        assert!((t.correlation[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_gives_zero() {
        let s = SkewSystem::reference(1e-2).unwrap();
        let t = correlation_decay(&s, Observable::Constant(0.3), Observable::X, 5, 200, 4, 1000, Streams::new(1)).unwrap();
        assert!(t.correlation.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn coordinates_decorrelate() {
        let s = SkewSystem::reference(1e-2).unwrap();
        for h in [Observable::X, Observable::Theta] {
            let t = correlation_decay(&s, h, h, 100, 5000, 40, 1000, Streams::new(2)).unwrap();
            assert!(t.crossing_lag(CORRELATION_THRESHOLD).is_some_and(|k| k <= 50), "{h} {:?}", &t.correlation[..10]);
            assert!(!t.grows_monotonically_after(5));
        }
    }
}
