use rand::Rng;
use serde::Serialize;

use super::{FiberedSystem, TrapRegion};
use crate::error::{precondition, Result};
use crate::numerics::{summarize, Summary};
use crate::sampling::{map_samples, unit_open_closed, Streams};

/// Number of θ bins for the base marginal of the pushforward.
const MARGINAL_BINS: usize = 20;

/// Time-averaged pushforward of `μ_S × δ_{y₀}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SrbSummary {
    pub y0: f64,
    pub n: usize,
    pub samples: usize,
    /// Average of `G(θ,y) = y` over times and base samples.
    pub mean_y: f64,
    /// Bin masses of the θ-marginal.
    pub theta_marginal: Vec<f64>,
    /// L¹ distance of the θ-marginal from Lebesgue.
    pub theta_l1: f64,
    pub fiber_exponent: Summary,
}

/// Per-sample Birkhoff averages of `y`, θ-bin counts and fiber exponents.
fn run(
    fs: &FiberedSystem,
    y0: f64,
    n: usize,
    samples: usize,
    streams: Streams,
) -> Vec<(f64, [u64; MARGINAL_BINS], f64)> {
    let streams = streams.domain("srb");
    map_samples(samples, |i| {
        let mut rng = streams.rng(i as u64);
        let mut t = unit_open_closed(&mut rng);
        let mut y = y0;
        let (mut sy, mut sl) = (0.0, 0.0);
        let mut bins = [0u64; MARGINAL_BINS];
        for _ in 0..n {
            sy += y;
            sl += (2.0 * y.abs()).max(f64::MIN_POSITIVE).ln();
            let b = ((t * MARGINAL_BINS as f64).ceil() as usize).clamp(1, MARGINAL_BINS) - 1;
            bins[b] += 1;
            (t, y) = fs.step_sampled(t, y, &mut rng);
        }
        (sy / n as f64, bins, sl / n as f64)
    })
}

/// Birkhoff statistics of `ψ` from Lebesgue-random `θ` and a fixed `y₀ ∈ U`.
pub fn srb_pushforward(
    fs: &FiberedSystem,
    region: &TrapRegion,
    y0: f64,
    n: usize,
    samples: usize,
    streams: Streams,
) -> Result<SrbSummary> {
    if !region.contains(y0) {
        return precondition(format!("y0 = {y0} is outside the certified trap"));
    }
    if n == 0 || samples == 0 {
        return precondition("srb_pushforward needs n > 0 and samples > 0");
    }
    let per = run(fs, y0, n, samples, streams);
    let mean_y = per.iter().map(|p| p.0).sum::<f64>() / samples as f64;
    let mut bins = [0u64; MARGINAL_BINS];
    for p in &per {
        for (a, b) in bins.iter_mut().zip(&p.1) {
            *a += b;
        }
    }
    let total = (n * samples) as f64;
    let theta_marginal: Vec<f64> = bins.iter().map(|&c| c as f64 / total).collect();
    let q = 1.0 / MARGINAL_BINS as f64;
    let theta_l1 = theta_marginal.iter().map(|p| (p - q).abs()).sum();
    let fiber_exponent = summarize(&per.iter().map(|p| p.2).collect::<Vec<_>>());
    Ok(SrbSummary { y0, n, samples, mean_y, theta_marginal, theta_l1, fiber_exponent })
}

/// Birkhoff averages of `y` from two starts over the same base orbits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pairing {
    pub y1: f64,
    pub y2: f64,
    pub average1: f64,
    pub average2: f64,
    pub difference: f64,
    /// `|y₁ - y₂| / (n (1 - λ))`, the a priori bound from contraction.
    pub bound: f64,
}

pub fn pairing_test(
    fs: &FiberedSystem,
    region: &TrapRegion,
    (y1, y2): (f64, f64),
    n: usize,
    samples: usize,
    streams: Streams,
) -> Result<Pairing> {
    let a = srb_pushforward(fs, region, y1, n, samples, streams)?;
    let b = srb_pushforward(fs, region, y2, n, samples, streams)?;
    let bound = if region.period == 1 {
        (y1 - y2).abs() / (n as f64 * (1.0 - region.lambda))
    } else {
        f64::NAN
    };
    Ok(Pairing {
        y1,
        y2,
        average1: a.mean_y,
        average2: b.mean_y,
        difference: (a.mean_y - b.mean_y).abs(),
        bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum FiberExponent {
    Value(f64),
    /// The orbit hit `y = 0` exactly.
    Degenerate,
    /// The start never entered the trap within the cap.
    NotApplicable,
}

/// `(1/n) Σ log|T'(y_j)|` along the orbit of `(θ,y)` once it is trapped.
pub fn fiber_exponent<R: Rng + ?Sized>(
    fs: &FiberedSystem,
    region: &TrapRegion,
    start: (f64, f64),
    n: usize,
    cap: usize,
    rng: &mut R,
) -> FiberExponent {
    let (mut t, mut y) = start;
    let mut k = 0;
    while !region.contains(y) {
        if k == cap {
            return FiberExponent::NotApplicable;
        }
        (t, y) = fs.step_sampled(t, y, rng);
        k += 1;
    }
    let mut s = 0.0;
    for _ in 0..n {
        if y == 0.0 {
            return FiberExponent::Degenerate;
        }
        s += (2.0 * y.abs()).ln();
        (t, y) = fs.step_sampled(t, y, rng);
    }
    FiberExponent::Value(s / n as f64)
}

/// Exponents of Lebesgue-random starts in `(0,1] × U`; degenerate orbits
/// are dropped.
pub fn trapped_exponents(
    fs: &FiberedSystem,
    region: &TrapRegion,
    n: usize,
    samples: usize,
    streams: Streams,
) -> Vec<f64> {
    let streams = streams.domain("trapped-exponents");
    let per: Vec<FiberExponent> = map_samples(samples, |i| {
        let mut rng = streams.rng(i as u64);
        let comp = rng.gen_range(0..region.cycle.len());
        let y = region.cycle[comp] + region.radius * (2.0 * rng.gen::<f64>() - 1.0) * (1.0 - 1e-12);
        let t = unit_open_closed(&mut rng);
        fiber_exponent(fs, region, (t, y), n, 0, &mut rng)
    });
    per.into_iter()
        .filter_map(|e| match e {
            FiberExponent::Value(v) => Some(v),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibered::{build_trap, TrapSearch};

    fn setup(eps: f64) -> (FiberedSystem, TrapRegion) {
        let fs = FiberedSystem::standard(0.5, eps).unwrap();
        let t = build_trap(&fs, &TrapSearch::default()).unwrap();
        (fs, t)
    }

    #[test]
    fn uncoupled_average_is_fixed_point() {
        let (fs, t) = setup(0.0);
        let ystar = (3f64.sqrt() - 1.0) / 2.0;
        let s = srb_pushforward(&fs, &t, ystar + 0.5 * t.radius, 10_000, 20, Streams::new(1)).unwrap();
        assert!((s.mean_y - ystar).abs() < 1e-3);
        assert!((s.fiber_exponent.mean - (2.0 * ystar).ln()).abs() < 0.02);
        assert!(s.theta_l1 <= 0.02, "{}", s.theta_l1);
    }

    #[test]
    fn exact_exponent_at_fixed_point() {
        let (fs, t) = setup(0.0);
        let ystar = t.cycle[0];
        let mut rng = Streams::new(0).rng(0);
        let FiberExponent::Value(v) = fiber_exponent(&fs, &t, (0.3, ystar), 1000, 0, &mut rng) else { panic!() };
        assert!((v - (2.0 * ystar).ln()).abs() < 1e-12);
        assert!((v - (3f64.sqrt() - 1.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn pairing_contracts() {
        let (fs, t) = setup(0.01);
        let p = t.cycle[0];
        let r = pairing_test(&fs, &t, (p - 1e-3, p + 1e-3), 10_000, 10, Streams::new(2)).unwrap();
        assert!(r.difference <= r.bound, "{r:?}");
        assert!(r.difference < 1e-6, "{r:?}");
    }

    #[test]
    fn outside_start() {
        let (fs, t) = setup(0.01);
        let mut rng = Streams::new(0).rng(0);
        assert_eq!(fiber_exponent(&fs, &t, (0.3, 1.9), 10, 0, &mut rng), FiberExponent::NotApplicable);
        assert!(srb_pushforward(&fs, &t, 1.9, 10, 1, Streams::new(0)).is_err());
    }

    #[test]
    fn trapped_exponents_below_lambda() {
        let (fs, t) = setup(0.01);
        let v = trapped_exponents(&fs, &t, 2000, 50, Streams::new(3));
        assert_eq!(v.len(), 50);
        assert!(v.iter().all(|e| *e <= t.lambda.ln() + 0.05));
    }
}
