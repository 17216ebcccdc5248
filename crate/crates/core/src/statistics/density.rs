use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use super::burned_start;
use crate::error::{precondition, Result};
use crate::sampling::{map_samples, Streams};
use crate::skew::SkewSystem;

/// Two half-sample histograms further apart than this in total variation
/// mark the pooled estimate as not converged.
pub const CONVERGENCE_TOL: f64 = 0.1;

/// Birkhoff histogram on `(0,1] × [x_lo, x_hi]`, theta-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityHistogram {
    pub theta_bins: usize,
    pub x_bins: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    pub counts: Vec<u64>,
    pub total: u64,
    /// Total variation between the even- and odd-indexed sample halves.
    pub halves_tv: f64,
    pub non_convergent: bool,
}

impl DensityHistogram {
    fn empty(theta_bins: usize, x_bins: usize, x_lo: f64, x_hi: f64) -> Self {
        Self {
            theta_bins,
            x_bins,
            x_lo,
            x_hi,
            counts: vec![0; theta_bins * x_bins],
            total: 0,
            halves_tv: 0.0,
            non_convergent: false,
        }
    }

    #[inline]
    fn bin_of(&self, theta: f64, x: f64) -> usize {
        let i = ((theta * self.theta_bins as f64).ceil() as usize).clamp(1, self.theta_bins) - 1;
        let u = (x - self.x_lo) / (self.x_hi - self.x_lo);
        let j = ((u * self.x_bins as f64).floor().max(0.0) as usize).min(self.x_bins - 1);
        i * self.x_bins + j
    }

    fn add(&mut self, other: &Self) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
    }

    /// Normalized bin masses.
    pub fn masses(&self) -> Vec<f64> {
        let t = self.total.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }

    pub fn x_marginal(&self) -> Vec<f64> {
        let m = self.masses();
        (0..self.x_bins).map(|j| (0..self.theta_bins).map(|i| m[i * self.x_bins + j]).sum()).collect()
    }

    pub fn theta_marginal(&self) -> Vec<f64> {
        let m = self.masses();
        m.chunks(self.x_bins).map(|row| row.iter().sum()).collect()
    }

    /// `Σ |p_j - q_j|` between the x-marginal and reference bin masses.
    pub fn x_l1(&self, reference: &[f64]) -> f64 {
        self.x_marginal().iter().zip(reference).map(|(p, q)| (p - q).abs()).sum()
    }

    /// L¹ distance of the θ-marginal from Lebesgue.
    pub fn theta_l1_uniform(&self) -> f64 {
        let q = 1.0 / self.theta_bins as f64;
        self.theta_marginal().iter().map(|p| (p - q).abs()).sum()
    }

    pub fn total_variation(&self, other: &Self) -> f64 {
        0.5 * self.masses().iter().zip(other.masses()).map(|(p, q)| (p - q).abs()).sum::<f64>()
    }

    /// Centers of the x bins.
    pub fn x_centers(&self) -> Vec<f64> {
        let h = (self.x_hi - self.x_lo) / self.x_bins as f64;
        (0..self.x_bins).map(|j| self.x_lo + (j as f64 + 0.5) * h).collect()
    }
}

/// Masses of the x bins under `1/(π√(4-x²))` on `[-2, 2]`.
pub fn chebyshev_bin_masses(x_lo: f64, x_hi: f64, bins: usize) -> Vec<f64> {
    let cdf = |x: f64| 0.5 + (x.clamp(-2.0, 2.0) / 2.0).asin() / PI;
    let h = (x_hi - x_lo) / bins as f64;
    (0..bins).map(|j| cdf(x_lo + (j + 1) as f64 * h) - cdf(x_lo + j as f64 * h)).collect()
}

/// Histogram of `n` post-burn-in orbit points per sample over the trap.
pub fn invariant_density(
    sys: &SkewSystem,
    burn_in: usize,
    n: usize,
    theta_bins: usize,
    x_bins: usize,
    samples: usize,
    streams: Streams,
) -> Result<DensityHistogram> {
    if n == 0 || samples == 0 {
        return precondition("invariant_density needs n > 0 and samples > 0");
    }
    if burn_in < 1000 {
        return precondition("invariant_density needs burn_in >= 1000");
    }
    if theta_bins == 0 || x_bins == 0 {
        return precondition("invariant_density needs at least one bin");
    }
    let trap = sys.trap();
    let template = DensityHistogram::empty(theta_bins, x_bins, trap.lo, trap.hi);
    let streams = streams.domain("density");
    let per: Vec<DensityHistogram> = map_samples(samples, |i| {
        let mut rng = streams.rng(i as u64);
        let mut h = template.clone();
        let (mut t, mut x) = burned_start(sys, burn_in, &mut rng);
        for _ in 0..n {
            let b = h.bin_of(t, x);
            h.counts[b] += 1;
            (t, x) = sys.step_sampled(t, x, &mut rng);
        }
        h.total = n as u64;
        h
    });
    let (mut even, mut odd) = (template.clone(), template.clone());
    for (i, h) in per.iter().enumerate() {
        if i % 2 == 0 { even.add(h) } else { odd.add(h) }
    }
    let mut out = template;
    out.add(&even);
    out.add(&odd);
    out.halves_tv = if samples > 1 { even.total_variation(&odd) } else { f64::NAN };
    out.non_convergent = out.halves_tv > CONVERGENCE_TOL;
    Ok(out)
}

/// Total variation between the histogram and its one-step push, where each
/// bin's mass is carried by `points_per_bin` uniform points (Ulam's scheme).
pub fn transfer_defect(sys: &SkewSystem, h: &DensityHistogram, points_per_bin: usize, streams: Streams) -> f64 {
    let streams = streams.domain("ulam");
    let masses = h.masses();
    let base = sys.base();
    let dx = (h.x_hi - h.x_lo) / h.x_bins as f64;
    let pushed: Vec<Vec<(usize, f64)>> = map_samples(masses.len(), |b| {
        let m = masses[b];
        if m == 0.0 {
            return Vec::new();
        }
        let mut rng = streams.rng(b as u64);
        let (i, j) = (b / h.x_bins, b % h.x_bins);
        let w = m / points_per_bin as f64;
        (0..points_per_bin)
            .filter_map(|_| {
                let t = (i as f64 + 1.0 - rng.gen::<f64>()) / h.theta_bins as f64;
                let x = h.x_lo + (j as f64 + rng.gen::<f64>()) * dx;
                let k = base.branch_index(t)?;
                let t1 = base.eval_branch(k, t).clamp(f64::MIN_POSITIVE, 1.0);
                Some((h.bin_of(t1, sys.fiber().eval(t, x)), w))
            })
            .collect()
    });
    let mut q = vec![0.0; masses.len()];
    for v in pushed {
        for (b, w) in v {
            q[b] += w;
        }
    }
    0.5 * masses.iter().zip(&q).map(|(p, q)| (p - q).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_map::BaseMap;
    use crate::skew::FiberMap;

    fn chebyshev() -> SkewSystem {
        SkewSystem::new(BaseMap::uniform_linear(16).unwrap(), FiberMap::viana(2.0, 0.0)).unwrap()
    }

    #[test]
    fn chebyshev_masses_sum_to_one() {
        let m = chebyshev_bin_masses(-2.0, 2.0, 200);
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((m[100] - (0.01f64).asin() / PI).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_marginals() {
        let s = chebyshev();
        let h = invariant_density(&s, 1000, 10_000, 16, 200, 100, Streams::new(3)).unwrap();
        assert_eq!(h.masses().iter().sum::<f64>().round(), 1.0);
        let l1 = h.x_l1(&chebyshev_bin_masses(h.x_lo, h.x_hi, 200));
        assert!(l1 <= 0.05, "{l1}");
        assert!(h.theta_l1_uniform() <= 0.02, "{}", h.theta_l1_uniform());
        assert!(!h.non_convergent);
    }

    #[test]
    fn ulam_push_is_consistent() {
        let s = SkewSystem::reference(1e-2).unwrap();
        let h = invariant_density(&s, 1000, 5_000, 16, 100, 200, Streams::new(5)).unwrap();
        let d = transfer_defect(&s, &h, 200, Streams::new(6));
        assert!(d <= 2.0 * h.halves_tv, "{d} vs band {}", h.halves_tv);
    }

    #[test]
    fn rejects_empty() {
        assert!(invariant_density(&chebyshev(), 1000, 0, 4, 4, 4, Streams::new(0)).is_err());
    }
}
