use rand::Rng;
use serde::Serialize;

use crate::error::{precondition, Result};
use crate::numerics::{fit_line, LineFit};
use crate::sampling::{map_samples, Streams};
use crate::skew::SkewSystem;

/// Per-α outcome of the first-return search from `|x| < 2√α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReturnTime {
    pub alpha: f64,
    /// Minimal first time `j ≥ 1` with `|x_j| < √α` over the samples.
    pub n_hat: usize,
    /// True when some sample hit the iteration cap, so `n_hat` is a lower
    /// bound only.
    pub censored: bool,
    /// Smallest `η` for which `|∂ₓφ^j| ≥ |x| α^{-1+η}` held at every
    /// sampled first return.
    pub eta_required: f64,
}

/// Sample `(θ,x)` with `|x| < 2√α` and follow each orbit to its first return
/// into `|x| < √α`.
pub fn first_return_times(sys: &SkewSystem, samples: usize, cap: usize, streams: Streams) -> Result<ReturnTime> {
    let alpha = sys.alpha();
    if !(alpha > 0.0) {
        return precondition("first return search needs alpha > 0");
    }
    let s = alpha.sqrt();
    let streams = streams.domain("first-return");
    let per: Vec<(Option<usize>, f64)> = map_samples(samples, |i| {
        let mut rng = streams.rng(i as u64);
        let (t0, _) = sys.random_point(&mut rng);
        let mut x0 = 0.0;
        while x0 == 0.0 {
            x0 = 2.0 * s * (2.0 * rng.gen::<f64>() - 1.0);
        }
        let (mut t, mut x) = (t0, x0);
        let mut log_der = 0.0;
        for j in 1..=cap {
            log_der += (2.0 * x.abs()).ln();
            (t, x) = sys.step_sampled(t, x, &mut rng);
            if x.abs() < s {
                // η ≥ 1 + (log|∂ₓφ^j| - log|x|)/log α
                let eta = 1.0 + (log_der - x0.abs().ln()) / alpha.ln();
                return (Some(j), eta);
            }
        }
        (None, f64::NEG_INFINITY)
    });
    let censored = per.iter().any(|p| p.0.is_none());
    let n_hat = per.iter().filter_map(|p| p.0).min().unwrap_or(cap);
    let eta_required = per.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(ReturnTime { alpha, n_hat, censored, eta_required })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionLadder {
    pub rows: Vec<ReturnTime>,
    /// `min N̂ / log(1/α)` and `max N̂ / log(1/α)` over the ladder.
    pub k0: f64,
    pub k1: f64,
    pub fit: Option<LineFit>,
    /// `N̂` is nondecreasing as α shrinks.
    pub monotone: bool,
    /// Fitted `η = max(η_required)` over the ladder, floored just above 0.
    pub eta: f64,
}

impl ExpansionLadder {
    pub fn eta_admissible(&self) -> bool {
        self.eta > 0.0 && self.eta <= 1.0 / 3.0
    }
}

/// `N̂(α)` over a ladder of α values, using `build(α)` for the system at
/// each rung.
pub fn n_of_alpha<F>(build: F, alphas: &[f64], samples: usize, cap: usize, streams: Streams) -> Result<ExpansionLadder>
where
    F: Fn(f64) -> Result<SkewSystem>,
{
    let mut rows = Vec::with_capacity(alphas.len());
    for &a in alphas {
        let sys = build(a)?;
        rows.push(first_return_times(&sys, samples, cap, streams)?);
    }
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| b.alpha.total_cmp(&a.alpha));
    let monotone = sorted.windows(2).all(|w| w[1].n_hat >= w[0].n_hat);
    let ratios: Vec<f64> = rows.iter().map(|r| r.n_hat as f64 / (1.0 / r.alpha).ln()).collect();
    let xs: Vec<f64> = rows.iter().map(|r| (1.0 / r.alpha).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.n_hat as f64).collect();
    let eta = rows.iter().map(|r| r.eta_required).fold(f64::NEG_INFINITY, f64::max).max(1e-6);
    Ok(ExpansionLadder {
        k0: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        k1: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        fit: fit_line(&xs, &ys),
        monotone,
        eta,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_alpha_zero() {
        let s = SkewSystem::new(
            crate::base_map::BaseMap::uniform_linear(16).unwrap(),
            crate::skew::FiberMap::viana(2.0, 0.0),
        )
        .unwrap();
        assert!(first_return_times(&s, 10, 100, Streams::new(1)).is_err());
    }

    #[test]
    fn ladder_grows() {
        let l = n_of_alpha(SkewSystem::reference, &[1e-2, 1e-3, 1e-4], 1000, 10_000, Streams::new(5)).unwrap();
        assert!(l.rows.iter().all(|r| r.n_hat >= 2 && !r.censored), "{l:?}");
        assert!(l.monotone, "{l:?}");
        assert!(l.k0 <= l.k1);
        // The η bound is an asymptotic statement; it already holds from α = 10⁻³.
        for r in l.rows.iter().filter(|r| r.alpha <= 1e-3) {
            assert!(r.eta_required > 0.0 && r.eta_required <= 1.0 / 3.0, "{r:?}");
        }
    }
}
