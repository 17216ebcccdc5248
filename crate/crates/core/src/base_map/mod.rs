//! Full-branch Markov expanding maps of (0,1].
//!
//! Each retained interval `ω_i = (b_i, b_{i+1}]` is mapped increasingly onto
//! (0,1] by `g_i(θ) = L((θ - b_i)/w_i) + A sin(2π f θ)`, where `L` is the
//! identity or the quadratic `u + q u (1 - u)`. Every derivative up to order
//! three comes from these closed forms.

mod closeness;
mod cylinder;
mod partition;

pub use closeness::{base_c3_distance, c3_distance, C3Distance};
pub use cylinder::{distortion_ratio, gibbs_check, gibbs_band, Cylinder, Itinerary};
pub use partition::MarkovPartition;

use std::f64::consts::PI;

use crate::error::{precondition, Error, Result};

/// Smallest admissible expansion of an unperturbed base.
pub const EXPANSION_FLOOR: f64 = 16.0;

/// Grid nodes per branch used for the construction-time measurements.
pub const DEFAULT_GRID: usize = 1024;

const MARKOV_TOL: f64 = 1e-12;

/// Value and first three derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// Shape of the rescaled branch map on the unit interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchShape {
    Linear,
    /// `u + q u (1 - u)` with `0 <= q < 1`.
    Quadratic { q: f64 },
}

impl BranchShape {
    fn jet(self, u: f64) -> Jet {
        match self {
            BranchShape::Linear => Jet { v: u, d1: 1.0, d2: 0.0, d3: 0.0 },
            BranchShape::Quadratic { q } => Jet {
                v: (1.0 + q) * u - q * u * u,
                d1: 1.0 + q - 2.0 * q * u,
                d2: -2.0 * q,
                d3: 0.0,
            },
        }
    }

    fn increment(self, u: f64, du: f64) -> f64 {
        match self {
            BranchShape::Linear => du,
            BranchShape::Quadratic { q } => du * (1.0 + q - q * (2.0 * u + du)),
        }
    }

    /// Closed-form sup of `|L''| / |L'|^2`, which is scale invariant.
    pub fn analytic_renyi(self) -> f64 {
        match self {
            BranchShape::Linear => 0.0,
            BranchShape::Quadratic { q } => 2.0 * q / ((1.0 - q) * (1.0 - q)),
        }
    }
}

/// Global perturbation `A sin(2π f θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineBump {
    pub amplitude: f64,
    pub frequency: f64,
}

impl SineBump {
    fn omega(&self) -> f64 {
        2.0 * PI * self.frequency
    }

    pub fn jet(&self, theta: f64) -> Jet {
        let w = self.omega();
        let (s, c) = (w * theta).sin_cos();
        let a = self.amplitude;
        Jet { v: a * s, d1: a * w * c, d2: -a * w * w * s, d3: -a * w * w * w * c }
    }

    fn increment(&self, theta: f64, dt: f64) -> f64 {
        let w = self.omega();
        2.0 * self.amplitude * (w * (theta + 0.5 * dt)).cos() * (0.5 * w * dt).sin()
    }

    /// Sup of `|B'|` over the line.
    pub fn c1_size(&self) -> f64 {
        self.amplitude.abs() * self.omega()
    }
}

/// A full-branch Markov expanding map with measured expansion and Rényi
/// constants. Immutable after construction.
#[derive(Debug, Clone)]
pub struct BaseMap {
    partition: MarkovPartition,
    shape: BranchShape,
    bump: Option<SineBump>,
    inv_width: Vec<f64>,
    uniform: Option<usize>,
    expansion: f64,
    renyi: f64,
}

impl BaseMap {
    pub fn new(partition: MarkovPartition, shape: BranchShape, bump: Option<SineBump>) -> Result<Self> {
        if let BranchShape::Quadratic { q } = shape {
            if !(0.0..1.0).contains(&q) {
                return precondition("quadratic branch parameter must satisfy 0 <= q < 1");
            }
        }
        let n = partition.len();
        let inv_width = (0..n).map(|i| 1.0 / partition.width(i)).collect();
        let uniform = {
            let b = partition.breakpoints();
            let ok = partition.residual_mass() == 0.0
                && b.iter().enumerate().all(|(i, &x)| x == i as f64 / n as f64 || i == n);
            ok.then_some(n)
        };
        let mut map = Self { partition, shape, bump, inv_width, uniform, expansion: 0.0, renyi: 0.0 };

        let defect = map.markov_defect();
        if defect > MARKOV_TOL {
            return Err(Error::Structural(format!(
                "branches are not full: endpoint defect {defect:.3e}"
            )));
        }
        let floor = map.expansion_floor(DEFAULT_GRID);
        let allowance = bump.map_or(0.0, |b| b.c1_size());
        if floor < EXPANSION_FLOOR - allowance - 1e-9 {
            return precondition(format!(
                "expansion {floor:.4} is below the floor {EXPANSION_FLOOR} (perturbation allowance {allowance:.3e})"
            ));
        }
        map.expansion = floor;
        map.renyi = map.renyi_constant(DEFAULT_GRID)?;
        Ok(map)
    }

    /// `θ ↦ Tθ mod 1` on `T` equal branches.
    pub fn uniform_linear(branches: usize) -> Result<Self> {
        Self::new(MarkovPartition::uniform(branches)?, BranchShape::Linear, None)
    }

    /// Uniform linear branches plus `A sin(2π f θ)`. The frequency must make
    /// the bump vanish on every breakpoint.
    pub fn perturbed_linear(branches: usize, amplitude: f64, frequency: f64) -> Result<Self> {
        Self::new(
            MarkovPartition::uniform(branches)?,
            BranchShape::Linear,
            Some(SineBump { amplitude, frequency }),
        )
    }

    pub fn quadratic(branches: usize, q: f64) -> Result<Self> {
        Self::new(MarkovPartition::uniform(branches)?, BranchShape::Quadratic { q }, None)
    }

    pub fn partition(&self) -> &MarkovPartition {
        &self.partition
    }

    pub fn shape(&self) -> BranchShape {
        self.shape
    }

    pub fn bump(&self) -> Option<SineBump> {
        self.bump
    }

    pub fn branch_count(&self) -> usize {
        self.partition.len()
    }

    /// Measured `inf |g'|`; plays the role of `d` in every bound.
    pub fn expansion(&self) -> f64 {
        self.expansion
    }

    /// Measured Rényi constant `sup |g''| / |g'|^2`.
    pub fn renyi(&self) -> f64 {
        self.renyi
    }

    /// True when the branches are affine, so derivatives are constant.
    pub fn is_linear(&self) -> bool {
        self.shape == BranchShape::Linear && self.bump.is_none()
    }

    pub fn branch_index(&self, theta: f64) -> Option<usize> {
        if let Some(n) = self.uniform {
            if !(theta > 0.0) || theta > 1.0 {
                return None;
            }
            let b = self.partition.breakpoints();
            let mut k = ((theta * n as f64).ceil() as usize).clamp(1, n) - 1;
            if theta <= b[k] {
                k -= 1;
            } else if theta > b[k + 1] {
                k += 1;
            }
            return Some(k);
        }
        self.partition.branch_index(theta)
    }

    /// Jet of branch `i` extended smoothly to all real `θ`.
    pub fn branch_jet(&self, i: usize, theta: f64) -> Jet {
        let (b, _) = self.partition.interval(i);
        let iw = self.inv_width[i];
        let l = self.shape.jet((theta - b) * iw);
        let mut j = Jet { v: l.v, d1: l.d1 * iw, d2: l.d2 * iw * iw, d3: l.d3 * iw * iw * iw };
        if let Some(bump) = &self.bump {
            let p = bump.jet(theta);
            j.v += p.v;
            j.d1 += p.d1;
            j.d2 += p.d2;
            j.d3 += p.d3;
        }
        j
    }

    /// Branch `i` evaluated at `θ` without any lookup or clamping.
    pub fn eval_branch(&self, i: usize, theta: f64) -> f64 {
        let (b, _) = self.partition.interval(i);
        let mut v = self.shape.jet((theta - b) * self.inv_width[i]).v;
        if let Some(bump) = &self.bump {
            v += bump.jet(theta).v;
        }
        v
    }

    /// First derivative of branch `i` at `θ`.
    pub fn branch_derivative(&self, i: usize, theta: f64) -> f64 {
        if self.is_linear() {
            return self.inv_width[i];
        }
        self.branch_jet(i, theta).d1
    }

    /// `g(θ)`, rounded into (0,1].
    pub fn eval(&self, theta: f64) -> Result<f64> {
        let i = self.branch_index(theta).ok_or(Error::Truncation(theta))?;
        Ok(clamp_unit(self.eval_branch(i, theta)))
    }

    /// `g, g', g'', g'''` at `θ`.
    pub fn jet(&self, theta: f64) -> Result<Jet> {
        let i = self.branch_index(theta).ok_or(Error::Truncation(theta))?;
        Ok(self.branch_jet(i, theta))
    }

    /// `g_i(θ + Δ) - g_i(θ)` without cancellation.
    pub fn branch_increment(&self, i: usize, theta: f64, delta: f64) -> f64 {
        let (b, _) = self.partition.interval(i);
        let iw = self.inv_width[i];
        let mut inc = self.shape.increment((theta - b) * iw, delta * iw);
        if let Some(bump) = &self.bump {
            inc += bump.increment(theta, delta);
        }
        inc
    }

    /// The point of the closure of `ω_i` that branch `i` maps to `y ∈ [0,1]`.
    pub fn inverse_branch(&self, i: usize, y: f64) -> f64 {
        let (b, e) = self.partition.interval(i);
        let w = e - b;
        if y <= 0.0 {
            return b;
        }
        if y >= 1.0 {
            return e;
        }
        match (self.shape, &self.bump) {
            (BranchShape::Linear, None) => return b + w * y,
            (BranchShape::Quadratic { q }, None) => {
                let s = 1.0 + q;
                let u = 2.0 * y / (s + (s * s - 4.0 * q * y).sqrt());
                return b + w * u;
            }
            _ => {}
        }
        let (mut lo, mut hi) = (b, e);
        let mut t = b + w * y;
        for _ in 0..200 {
            let j = self.branch_jet(i, t);
            let r = j.v - y;
            if r > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let mut next = t - r / j.d1;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 1e-16 || hi - lo <= 1e-15 {
                return next;
            }
            t = next;
        }
        t
    }

    /// Largest endpoint mismatch `max(|g_i(b_i)|, |g_i(b_{i+1}) - 1|)`.
    pub fn markov_defect(&self) -> f64 {
        (0..self.branch_count())
            .map(|i| {
                let (b, e) = self.partition.interval(i);
                self.eval_branch(i, b).abs().max((self.eval_branch(i, e) - 1.0).abs())
            })
            .fold(0.0, f64::max)
    }

    fn grid_nodes(&self, grid: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let g = grid.max(2);
        (0..self.branch_count()).flat_map(move |i| {
            let (b, e) = self.partition.interval(i);
            (0..g).map(move |k| (i, b + (e - b) * k as f64 / (g - 1) as f64))
        })
    }

    /// `min |g'|` over `grid` nodes per branch, endpoints included.
    pub fn expansion_floor(&self, grid: usize) -> f64 {
        self.grid_nodes(grid)
            .map(|(i, t)| self.branch_jet(i, t).d1)
            .fold(f64::INFINITY, f64::min)
    }

    /// `sup |g''| / |g'|^2` over `grid` nodes per branch.
    pub fn renyi_constant(&self, grid: usize) -> Result<f64> {
        if grid < 1000 {
            return precondition("renyi grid must have at least 1000 nodes");
        }
        Ok(self
            .grid_nodes(grid)
            .map(|(i, t)| {
                let j = self.branch_jet(i, t);
                j.d2.abs() / (j.d1 * j.d1)
            })
            .fold(0.0, f64::max))
    }

    /// Midpoint-rule value of `∫ log|g'| dθ` over the retained branches,
    /// together with the retained mass it was computed on.
    pub fn log_derivative_integral(&self, grid: usize) -> (f64, f64) {
        let g = grid.max(1);
        let mut total = 0.0;
        for i in 0..self.branch_count() {
            let (b, e) = self.partition.interval(i);
            let h = (e - b) / g as f64;
            total += (0..g)
                .map(|k| self.branch_jet(i, b + h * (k as f64 + 0.5)).d1.ln() * h)
                .sum::<f64>();
        }
        (total, self.partition.retained_end())
    }

    /// One base step followed by a re-randomization of the binary digits
    /// below `2^-40`.
    ///
    /// A double-precision orbit of an expanding map sheds
    /// `log2 |g'|` bits per step and collapses onto a dyadic point within a
    /// few dozen steps. Sampled orbits replace the digits that the expansion
    /// pushed out with fresh uniform ones so long Monte Carlo horizons
    /// remain Lebesgue-typical. `u` must lie in (0,1].
    pub fn step_refreshed(&self, theta: f64, u: f64) -> Result<f64> {
        Ok(refresh_digits(self.eval(theta)?, u))
    }
}

const REFRESH_SCALE: f64 = (1u64 << 40) as f64;

/// Keep the leading 40 binary digits of `θ ∈ (0,1]` and redraw the rest.
pub fn refresh_digits(theta: f64, u: f64) -> f64 {
    let cell = (theta * REFRESH_SCALE).floor().min(REFRESH_SCALE - 1.0);
    (cell + u) / REFRESH_SCALE
}

fn clamp_unit(v: f64) -> f64 {
    v.clamp(f64::MIN_POSITIVE, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_linear_values() {
        let g = BaseMap::uniform_linear(16).unwrap();
        assert!((g.eval(0.3).unwrap() - 0.8).abs() < 1e-14);
        assert_eq!(g.eval(1.0).unwrap(), 1.0);
        assert_eq!(g.branch_index(0.3), Some(4));
        assert_eq!(g.branch_index(1.0 / 16.0), Some(0));
        let j = g.jet(0.3).unwrap();
        assert_eq!((j.d1, j.d2, j.d3), (16.0, 0.0, 0.0));
        assert_eq!(g.renyi(), 0.0);
        assert_eq!(g.expansion(), 16.0);
    }

    #[test]
    fn uniform_fast_lookup_matches_search() {
        for n in [16, 17, 20, 33] {
            let g = BaseMap::uniform_linear(n).unwrap();
            for k in 1..=5000 {
                let t = k as f64 / 5000.0;
                assert_eq!(g.branch_index(t), g.partition().branch_index(t), "n={n} t={t}");
            }
            for i in 1..n {
                let b = g.partition().breakpoints()[i];
                assert_eq!(g.branch_index(b), Some(i - 1));
            }
        }
    }

    #[test]
    fn perturbed_value_is_close() {
        let g = BaseMap::perturbed_linear(16, 1e-3, 8.0).unwrap();
        assert!((g.eval(0.3).unwrap() - 0.8).abs() <= 1e-3);
        assert!(g.markov_defect() < 1e-12);
    }

    #[test]
    fn rejects_weak_expansion_and_broken_branches() {
        assert!(BaseMap::uniform_linear(8).is_err());
        assert!(BaseMap::quadratic(16, 0.2).is_err());
        // Frequency 3 does not vanish on sixteenths.
        assert!(BaseMap::perturbed_linear(16, 1e-3, 3.0).is_err());
    }

    #[test]
    fn quadratic_renyi_matches_closed_form() {
        let g = BaseMap::quadratic(32, 0.3).unwrap();
        let k = BranchShape::Quadratic { q: 0.3 }.analytic_renyi();
        assert!((g.renyi_constant(1000).unwrap() - k).abs() <= 0.01 * k);
        assert!(g.renyi_constant(10).is_err());
    }

    #[test]
    fn inverse_branches_roundtrip() {
        let maps = [
            BaseMap::uniform_linear(16).unwrap(),
            BaseMap::perturbed_linear(16, 4e-3, 8.0).unwrap(),
            BaseMap::quadratic(32, 0.4).unwrap(),
        ];
        for g in &maps {
            for i in [0, 3, g.branch_count() - 1] {
                for k in 1..50 {
                    let y = k as f64 / 50.0;
                    let t = g.inverse_branch(i, y);
                    assert!((g.eval_branch(i, t) - y).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn increments_match_differences() {
        let g = BaseMap::perturbed_linear(16, 4e-3, 8.0).unwrap();
        let q = BaseMap::quadratic(32, 0.4).unwrap();
        for (m, i, t) in [(&g, 5, 0.33), (&q, 7, 0.23)] {
            let d = 1e-3;
            let direct = m.eval_branch(i, t + d) - m.eval_branch(i, t);
            assert!((m.branch_increment(i, t, d) - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn log_derivative_integral_uniform() {
        let g = BaseMap::uniform_linear(16).unwrap();
        let (v, mass) = g.log_derivative_integral(10);
        assert!((v - 16f64.ln()).abs() < 1e-12);
        assert_eq!(mass, 1.0);
    }

    #[test]
    fn refresh_stays_in_cell() {
        let t = 0.123456789;
        for u in [1e-12, 0.5, 1.0] {
            let r = refresh_digits(t, u);
            assert!((r - t).abs() < 2.0 / REFRESH_SCALE && r > 0.0 && r <= 1.0);
        }
        assert_eq!(refresh_digits(1.0, 1.0), 1.0);
    }
}
