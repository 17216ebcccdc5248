use rand::Rng;
use serde::Serialize;

use crate::error::{precondition, Result};
use crate::numerics::{summarize, Summary};
use crate::sampling::{map_samples, Streams};
use crate::skew::SkewSystem;

/// Fixed non-vertical tangent vector for the generic exponent.
pub const GENERIC_VECTOR: [f64; 2] = [0.6, 0.8];

/// Finite-time exponents of one orbit, in nats per iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentSample {
    pub theta: f64,
    pub x: f64,
    pub n: usize,
    pub base: f64,
    pub fiber: f64,
    pub generic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovReport {
    pub n: usize,
    pub samples: Vec<ExponentSample>,
    pub base: Summary,
    pub fiber: Summary,
    pub generic: Summary,
    pub fraction_fiber_positive: f64,
    /// Orbits that hit `x = 0` exactly and were redrawn.
    pub resampled: usize,
}

impl LyapunovReport {
    pub fn fraction_fiber_above(&self, c: f64) -> f64 {
        let k = self.samples.iter().filter(|s| s.fiber > c).count();
        k as f64 / self.samples.len().max(1) as f64
    }
}

fn exponents<R: Rng + ?Sized>(sys: &SkewSystem, start: (f64, f64), n: usize, rng: &mut R) -> Option<ExponentSample> {
    let base = sys.base();
    let (mut t, mut x) = start;
    let (mut lb, mut lf, mut lg) = (0.0, 0.0, 0.0);
    let mut v = GENERIC_VECTOR;
    for _ in 0..n {
        let i = base.branch_index(t)?;
        let d = base.branch_derivative(i, t);
        let p = sys.fiber().partials(t, x);
        if p.fx == 0.0 {
            return None;
        }
        lb += d.abs().ln();
        lf += p.fx.abs().ln();
        let w = [d * v[0], p.ft * v[0] + p.fx * v[1]];
        let nv = w[0].hypot(w[1]);
        lg += nv.ln();
        v = [w[0] / nv, w[1] / nv];
        (t, x) = sys.step_sampled(t, x, rng);
    }
    let k = n as f64;
    Some(ExponentSample { theta: start.0, x: start.1, n, base: lb / k, fiber: lf / k, generic: lg / k })
}

/// Finite-time base, fiber (`v = ∂/∂x`) and generic exponents from
/// Lebesgue-random starts.
pub fn lyapunov_mc(sys: &SkewSystem, n: usize, samples: usize, streams: Streams) -> Result<LyapunovReport> {
    if n < 1000 {
        return precondition("lyapunov_mc needs n >= 1000");
    }
    if samples == 0 {
        return precondition("lyapunov_mc needs samples > 0");
    }
    let streams = streams.domain("lyapunov");
    let per: Vec<(ExponentSample, usize)> = map_samples(samples, |i| {
        let mut rng = streams.rng(i as u64);
        let mut redraws = 0;
        loop {
            let start = sys.random_point(&mut rng);
            if let Some(s) = exponents(sys, start, n, &mut rng) {
                return (s, redraws);
            }
            redraws += 1;
        }
    });
    let resampled = per.iter().map(|p| p.1).sum();
    let samples: Vec<ExponentSample> = per.into_iter().map(|p| p.0).collect();
    let pick = |f: fn(&ExponentSample) -> f64| summarize(&samples.iter().map(f).collect::<Vec<_>>());
    let positive = samples.iter().filter(|s| s.fiber > 0.0).count();
    Ok(LyapunovReport {
        n,
        base: pick(|s| s.base),
        fiber: pick(|s| s.fiber),
        generic: pick(|s| s.generic),
        fraction_fiber_positive: positive as f64 / samples.len() as f64,
        resampled,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_map::BaseMap;
    use crate::skew::FiberMap;

    #[test]
    fn chebyshev_control() {
        let s = SkewSystem::new(BaseMap::uniform_linear(16).unwrap(), FiberMap::viana(2.0, 0.0)).unwrap();
        let r = lyapunov_mc(&s, 10_000, 64, Streams::new(1)).unwrap();
        assert!((r.fiber.mean - 2f64.ln()).abs() < 0.02, "{:?}", r.fiber);
        assert_eq!(r.fraction_fiber_positive, 1.0);
        assert!((r.base.mean - 16f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn generic_is_max_of_base_and_fiber() {
        let s = SkewSystem::reference(1e-2).unwrap();
        let r = lyapunov_mc(&s, 2000, 16, Streams::new(2)).unwrap();
        for e in &r.samples {
            assert!((e.generic - e.base.max(e.fiber)).abs() < 1e-2, "{e:?}");
        }
    }

    #[test]
    fn short_horizon_rejected() {
        let s = SkewSystem::reference(1e-2).unwrap();
        assert!(lyapunov_mc(&s, 999, 4, Streams::new(0)).is_err());
    }
}
