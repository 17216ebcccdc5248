use rand::Rng;
use serde::Serialize;

use super::window::{return_depth, window_half_width};
use crate::numerics::{wilson, BAND_Z};
use crate::sampling::{map_samples, Streams};
use crate::skew::SkewSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReturnKind {
    Deep,
    Regular,
}

/// Entry of an orbit point into `J(0)` at time `ν`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReturnRecord {
    pub time: usize,
    /// Return depth for regular returns; `m` for deep ones.
    pub depth: u32,
    pub kind: ReturnKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnClassification {
    pub records: Vec<ReturnRecord>,
    pub m: u32,
    /// `(1/2 - η) log(1/α)`: regular returns at least this deep are heavy.
    pub heavy_threshold: f64,
    /// Sum of depths over heavy regular returns.
    pub heavy_sum: u64,
    pub deep_returns: usize,
}

pub fn heavy_threshold(alpha: f64, eta: f64) -> f64 {
    (0.5 - eta) * (1.0 / alpha).ln()
}

/// Classify `x_1, …, x_n` (time `ν` is index + 1) with `m = ⌊√n⌋`.
pub fn classify_orbit(alpha: f64, xs: &[f64], eta: f64) -> ReturnClassification {
    let m = (xs.len() as f64).sqrt().floor() as u32;
    let deep_half = window_half_width(alpha, f64::from(m));
    let thr = heavy_threshold(alpha, eta);
    let mut out = ReturnClassification {
        records: Vec::new(),
        m,
        heavy_threshold: thr,
        heavy_sum: 0,
        deep_returns: 0,
    };
    for (k, &x) in xs.iter().enumerate() {
        let Some(r) = return_depth(alpha, x, m) else { continue };
        if x.abs() <= deep_half {
            out.records.push(ReturnRecord { time: k + 1, depth: m, kind: ReturnKind::Deep });
            out.deep_returns += 1;
        } else {
            out.records.push(ReturnRecord { time: k + 1, depth: r, kind: ReturnKind::Regular });
            if f64::from(r) >= thr {
                out.heavy_sum += u64::from(r);
            }
        }
    }
    out
}

/// The fiber coordinates `x_1, …, x_n` of a sampled orbit.
pub fn sampled_fiber_orbit<R: Rng + ?Sized>(
    sys: &SkewSystem,
    start: (f64, f64),
    n: usize,
    rng: &mut R,
) -> Vec<f64> {
    let (mut t, mut x) = start;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        (t, x) = sys.step_sampled(t, x, rng);
        out.push(x);
    }
    out
}

/// Returns along the sampled orbit of `start` up to time `n`.
pub fn classify_returns<R: Rng + ?Sized>(
    sys: &SkewSystem,
    start: (f64, f64),
    n: usize,
    eta: f64,
    rng: &mut R,
) -> ReturnClassification {
    classify_orbit(sys.alpha(), &sampled_fiber_orbit(sys, start, n, rng), eta)
}

/// Fraction of Lebesgue samples with heavy-depth sum at least `c n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeavyTailRow {
    pub n: usize,
    pub m: u32,
    pub fraction: f64,
    pub lower: f64,
    pub upper: f64,
    pub deep_fraction: f64,
}

pub fn heavy_return_tail(
    sys: &SkewSystem,
    n_grid: &[usize],
    samples: usize,
    c: f64,
    eta: f64,
    streams: Streams,
) -> Vec<HeavyTailRow> {
    let horizon = n_grid.iter().copied().max().unwrap_or(0);
    let streams = streams.domain("heavy-returns");
    let per_sample: Vec<Vec<(bool, bool)>> = map_samples(samples, |i| {
        let mut rng = streams.rng(i as u64);
        let start = sys.random_point(&mut rng);
        let xs = sampled_fiber_orbit(sys, start, horizon, &mut rng);
        n_grid
            .iter()
            .map(|&n| {
                let cl = classify_orbit(sys.alpha(), &xs[..n], eta);
                (cl.heavy_sum as f64 >= c * n as f64, cl.deep_returns > 0)
            })
            .collect()
    });
    n_grid
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let hits = per_sample.iter().filter(|v| v[j].0).count() as u64;
            let deep = per_sample.iter().filter(|v| v[j].1).count();
            let (lower, upper) = wilson(hits, samples as u64, BAND_Z);
            HeavyTailRow {
                n,
                m: (n as f64).sqrt().floor() as u32,
                fraction: hits as f64 / samples.max(1) as f64,
                lower,
                upper,
                deep_fraction: deep as f64 / samples.max(1) as f64,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_returns() {
        let c = classify_orbit(1e-2, &[1.0, 1.5, -0.9], 0.25);
        assert!(c.records.is_empty());
        assert_eq!(c.heavy_sum, 0);
    }

    #[test]
    fn depth_bookkeeping() {
        let a: f64 = 1e-2;
        let s = a.sqrt();
        // n = 16 gives m = 4.
        let mut xs = vec![1.0; 16];
        xs[2] = s * (-2.5f64).exp();
        xs[5] = s * (-0.5f64).exp();
        xs[9] = s * (-4.2f64).exp();
        let c = classify_orbit(a, &xs, 0.25);
        assert_eq!(c.m, 4);
        assert_eq!(
            c.records,
            vec![
                ReturnRecord { time: 3, depth: 2, kind: ReturnKind::Regular },
                ReturnRecord { time: 6, depth: 0, kind: ReturnKind::Regular },
                ReturnRecord { time: 10, depth: 4, kind: ReturnKind::Deep },
            ]
        );
        // threshold (1/2 - 1/4) log 100 ≈ 1.15: only the depth-2 return is heavy.
        assert_eq!(c.heavy_sum, 2);
        assert_eq!(c.deep_returns, 1);
    }

    #[test]
    fn depth_matches_window_difference() {
        let a: f64 = 1e-2;
        let m = 8;
        for k in 1..2000 {
            let x = 0.1 * k as f64 / 2000.0;
            let r = return_depth(a, x, m).unwrap();
            assert!(x.abs() <= window_half_width(a, f64::from(r)));
            if r + 1 < m {
                assert!(x.abs() > window_half_width(a, f64::from(r + 1)));
            }
        }
    }
}
