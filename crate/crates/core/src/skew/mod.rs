//! Skew products `φ(θ,x) = (g(θ), f(θ,x))` over a Markov expanding base,
//! with quadratic fibers `f(θ,x) = c(θ) - x²`.

mod fiber;
mod misiurewicz;
mod tangent;
mod trap;

pub use fiber::{FiberBump, FiberMap, FiberPartials};
pub use misiurewicz::{
    certify_misiurewicz, find_misiurewicz, period2_multiplier, period2_point, Combinatorics,
    MisiurewiczCertificate, CRIT_TO_PERIOD2_BRACKET,
};
pub use tangent::TangentState;
pub use trap::{trapping_interval, TrapCheck, DEFAULT_TRAP_GRID};

use rand::Rng;

use crate::base_map::{refresh_digits, BaseMap};
use crate::error::{Error, Result};
use crate::sampling::unit_open_closed;

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Distance by which `x` lies outside, 0 inside.
    pub fn exit(&self, x: f64) -> f64 {
        (self.lo - x).max(x - self.hi).max(0.0)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// A generalized Viana map together with its trapping interval.
#[derive(Debug, Clone)]
pub struct SkewSystem {
    base: BaseMap,
    fiber: FiberMap,
    trap: Interval,
}

impl SkewSystem {
    /// Builds the trapping interval and verifies invariance on the default
    /// grid.
    pub fn new(base: BaseMap, fiber: FiberMap) -> Result<Self> {
        let trap = trapping_interval(&fiber);
        let sys = Self { base, fiber, trap };
        let check = sys.check_trapping(DEFAULT_TRAP_GRID.0, DEFAULT_TRAP_GRID.1);
        if !check.pass {
            return Err(Error::Trapping { exit: check.worst_exit, hint: sys.alpha_hint() });
        }
        Ok(sys)
    }

    /// Uses a caller-supplied interval without checking it.
    pub fn with_trap(base: BaseMap, fiber: FiberMap, trap: Interval) -> Self {
        Self { base, fiber, trap }
    }

    /// The reference system: 16 linear branches and the crit-to-period-2
    /// Misiurewicz parameter.
    pub fn reference(alpha: f64) -> Result<Self> {
        let a0 = find_misiurewicz(Combinatorics::CritToPeriod2, 1e-12)?;
        Self::new(BaseMap::uniform_linear(16)?, FiberMap::viana(a0, alpha))
    }

    pub fn base(&self) -> &BaseMap {
        &self.base
    }

    pub fn fiber(&self) -> &FiberMap {
        &self.fiber
    }

    pub fn trap(&self) -> Interval {
        self.trap
    }

    pub fn alpha(&self) -> f64 {
        self.fiber.alpha
    }

    fn alpha_hint(&self) -> String {
        let mut alpha = self.fiber.alpha;
        for _ in 0..40 {
            alpha *= 0.5;
            let f = FiberMap { alpha, ..self.fiber };
            let s = Self { base: self.base.clone(), fiber: f, trap: trapping_interval(&f) };
            if s.check_trapping(2000, 200).pass {
                return format!("alpha too large for a0 = {}; try alpha <= {alpha:.3e}", self.fiber.a0);
            }
        }
        format!("no admissible alpha found for a0 = {}", self.fiber.a0)
    }

    /// `φ(θ,x)`, failing if `x'` leaves the trapping interval.
    pub fn step(&self, theta: f64, x: f64) -> Result<(f64, f64)> {
        let t = self.base.eval(theta)?;
        let y = self.fiber.eval(theta, x);
        if !self.trap.contains(y) {
            return Err(Error::Escape { step: 0, x: y });
        }
        Ok((t, y))
    }

    /// The first `n` iterates after `(θ,x)`, not including the start.
    pub fn orbit(&self, theta: f64, x: f64, n: usize) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(n);
        let mut p = (theta, x);
        for k in 0..n {
            p = self.step(p.0, p.1).map_err(|e| match e {
                Error::Escape { x, .. } => Error::Escape { step: k + 1, x },
                e => e,
            })?;
            out.push(p);
        }
        Ok(out)
    }

    /// Streaming orbit; yields iterates until `n` steps or an error.
    pub fn orbit_iter(&self, theta: f64, x: f64) -> impl Iterator<Item = Result<(f64, f64)>> + '_ {
        let mut p = Some((theta, x));
        std::iter::from_fn(move || {
            let (t, y) = p?;
            let next = self.step(t, y);
            p = next.as_ref().ok().copied();
            Some(next)
        })
    }

    /// One step with the base digits below `2^-40` redrawn from `rng`.
    ///
    /// The fiber coordinate is exact; see [`BaseMap::step_refreshed`].
    #[inline]
    pub fn step_sampled<R: Rng + ?Sized>(&self, theta: f64, x: f64, rng: &mut R) -> (f64, f64) {
        let y = self.fiber.eval(theta, x);
        let i = self.base.branch_index(theta).expect("sampled orbits stay in retained branches");
        let t = self.base.eval_branch(i, theta).clamp(f64::MIN_POSITIVE, 1.0);
        (refresh_digits(t, unit_open_closed(rng)), y)
    }

    /// A Lebesgue-random point of `(0,1] × I₀`.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let end = self.base.partition().retained_end();
        let t = end * unit_open_closed(rng);
        let x = self.trap.lo + self.trap.len() * rng.gen::<f64>();
        (t, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Streams;

    fn chebyshev() -> SkewSystem {
        SkewSystem::new(BaseMap::uniform_linear(16).unwrap(), FiberMap::viana(2.0, 0.0)).unwrap()
    }

    #[test]
    fn chebyshev_step() {
        let s = chebyshev();
        assert_eq!(s.trap(), Interval::new(-2.0, 2.0));
        assert_eq!(s.step(1.0 / 32.0, 0.0).unwrap(), (0.5, 2.0));
    }

    #[test]
    fn fixed_point_of_fiber_persists() {
        let s = SkewSystem::new(BaseMap::uniform_linear(16).unwrap(), FiberMap::viana(1.5, 0.0)).unwrap();
        let p = (-1.0 + 7f64.sqrt()) / 2.0;
        for (_, x) in s.orbit(0.37, p, 50).unwrap() {
            assert!((x - p).abs() < 1e-15);
        }
    }

    #[test]
    fn reference_orbit_matches_reevaluation() {
        let s = SkewSystem::reference(0.01).unwrap();
        let mut rng = Streams::new(0).rng(0);
        let (t0, x0) = s.random_point(&mut rng);
        let orbit = s.orbit(t0, x0, 10).unwrap();
        let (mut t, mut x) = (t0, x0);
        let a0 = s.fiber().a0;
        for &(tn, xn) in &orbit {
            let nx = a0 + 0.01 * (2.0 * std::f64::consts::PI * t).sin() - x * x;
            let nt = 16.0 * t - (16.0 * t).ceil() + 1.0;
            assert!((xn - nx).abs() < 1e-12 && (tn - nt).abs() < 1e-12);
            t = tn;
            x = xn;
        }
        let streamed: Vec<_> = s.orbit_iter(t0, x0).take(10).map(|r| r.unwrap()).collect();
        assert_eq!(streamed, orbit);
    }

    #[test]
    fn fiber_decouples_without_alpha() {
        let s = chebyshev();
        let a = s.orbit(0.11, 0.3, 30).unwrap();
        let b = s.orbit(0.77, 0.3, 30).unwrap();
        assert!(a.iter().zip(&b).all(|(p, q)| p.1 == q.1));
    }

    #[test]
    fn escape_is_reported() {
        let base = BaseMap::uniform_linear(16).unwrap();
        let s = SkewSystem::with_trap(base, FiberMap::viana(1.8, 0.0), Interval::new(-0.5, 0.5));
        assert!(matches!(s.orbit(0.3, 0.0, 3), Err(Error::Escape { step: 1, .. })));
    }
}
