use super::{FiberMap, Interval, SkewSystem};

/// `(θ nodes, x nodes)` used when a system is constructed.
pub const DEFAULT_TRAP_GRID: (usize, usize) = (10_000, 1_000);

/// Outcome of a grid invariance check of `x ↦ f(θ,x)` on `I₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapCheck {
    pub pass: bool,
    /// Largest distance by which an image leaves `I₀`; 0 on success.
    pub worst_exit: f64,
    pub worst_theta: f64,
    pub worst_x: f64,
}

fn parameter_range(fiber: &FiberMap, grid: usize) -> (f64, f64) {
    let nodes = (1..=grid).map(|k| k as f64 / grid as f64);
    nodes
        .chain(fiber.critical_parameters())
        .map(|t| fiber.parameter(t))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c), hi.max(c)))
}

/// `I₀ = [c_min - (c_max + α)² - α, c_max + α]` where `c` ranges over the
/// values of `f(·, 0)`.
///
/// The top is the largest image plus a slack `α`; the bottom is the image
/// of the top minus the same slack. Without bump or shift this is
/// `[h²(0) - 2(1+2a₀)α - 4α², h(0) + 2α]`.
pub fn trapping_interval(fiber: &FiberMap) -> Interval {
    let (cmin, cmax) = parameter_range(fiber, DEFAULT_TRAP_GRID.0);
    let slack = fiber.alpha;
    let hi = cmax + slack;
    Interval::new(cmin - hi * hi - slack, hi)
}

impl SkewSystem {
    /// Grid check of `f(θ, I₀) ⊂ I₀`.
    ///
    /// Since `f` is decreasing in `|x|`, the extremes of each fiber image
    /// come from `x ∈ {0, lo, hi}`; those are always tested alongside the
    /// uniform `x` grid.
    pub fn check_trapping(&self, grid_theta: usize, grid_x: usize) -> TrapCheck {
        let trap = self.trap();
        let fiber = self.fiber();
        let xs: Vec<f64> = (0..grid_x.max(2))
            .map(|k| trap.lo + trap.len() * k as f64 / (grid_x.max(2) - 1) as f64)
            .chain([0.0, trap.lo, trap.hi, -trap.lo, -trap.hi])
            .filter(|x| trap.contains(*x))
            .collect();
        let mut out = TrapCheck { pass: true, worst_exit: 0.0, worst_theta: f64::NAN, worst_x: f64::NAN };
        let thetas = (1..=grid_theta.max(1)).map(|k| k as f64 / grid_theta.max(1) as f64);
        for t in thetas.chain(fiber.critical_parameters()) {
            let c = fiber.parameter(t);
            for &x in &xs {
                let e = trap.exit(c - x * x);
                if e > out.worst_exit {
                    out = TrapCheck { pass: false, worst_exit: e, worst_theta: t, worst_x: x };
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_map::BaseMap;
    use crate::error::Error;
    use crate::skew::{find_misiurewicz, Combinatorics};

    fn a0() -> f64 {
        find_misiurewicz(Combinatorics::CritToPeriod2, 1e-12).unwrap()
    }

    #[test]
    fn chebyshev_endpoints() {
        let i = trapping_interval(&FiberMap::viana(2.0, 0.0));
        assert_eq!((i.lo, i.hi), (-2.0, 2.0));
    }

    #[test]
    fn reference_interval_matches_closed_form() {
        let a = a0();
        let alpha = 0.01;
        let i = trapping_interval(&FiberMap::viana(a, alpha));
        let h2 = a - a * a;
        assert!((i.hi - (a + 2.0 * alpha)).abs() < 1e-12);
        let lo = h2 - 2.0 * (1.0 + 2.0 * a) * alpha - 4.0 * alpha * alpha;
        assert!((i.lo - lo).abs() < 1e-12);
        let s = SkewSystem::new(BaseMap::uniform_linear(16).unwrap(), FiberMap::viana(a, alpha)).unwrap();
        assert!(s.check_trapping(10_000, 1_000).pass);
    }

    #[test]
    fn large_alpha_fails() {
        let r = SkewSystem::new(BaseMap::uniform_linear(16).unwrap(), FiberMap::viana(a0(), 0.5));
        match r {
            Err(Error::Trapping { exit, hint }) => {
                assert!(exit > 0.0);
                assert!(hint.contains("alpha"));
            }
            other => panic!("expected trapping failure, got {other:?}"),
        }
    }

    #[test]
    fn shrunk_interval_fails() {
        let s = SkewSystem::reference(0.01).unwrap();
        let t = s.trap();
        let m = t.midpoint();
        let shrunk = Interval::new(m - 0.25 * t.len(), m + 0.25 * t.len());
        let s2 = SkewSystem::with_trap(s.base().clone(), *s.fiber(), shrunk);
        let c = s2.check_trapping(10_000, 1_000);
        assert!(!c.pass && c.worst_exit > 0.0);
    }
}
