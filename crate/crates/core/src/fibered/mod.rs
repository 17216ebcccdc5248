//! Fibered hyperbolic maps `ψ(θ,y) = (S(θ), T(y) + a(θ))` with `T(y) = c - y²`
//! hyperbolic, and the coexistence construction for skew products whose
//! fiber over a fixed point of the base is tuned into a periodic window.

mod attractors;
mod coexistence;
mod srb;
mod trap;

pub use attractors::{find_attractors, superattracting_period3, Attractor, PERIOD3_WINDOW};
pub use coexistence::{coexistence_demo, CoexistenceConfig, CoexistenceReport};
pub use srb::{fiber_exponent, pairing_test, srb_pushforward, trapped_exponents, FiberExponent, Pairing, SrbSummary};
pub use trap::{build_trap, trap_invariance, TrapRegion, TrapSearch};

use std::f64::consts::PI;

use rand::Rng;

use crate::base_map::{refresh_digits, BaseMap};
use crate::error::{precondition, Result};
use crate::sampling::unit_open_closed;
use crate::skew::FiberBump;

/// The coupling `a(θ)` added to the fiber map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Zero,
    /// `A sin(2π f θ)`.
    Sine { amplitude: f64, frequency: f64 },
    Bump(FiberBump),
}

impl Coupling {
    #[inline]
    pub fn eval(&self, theta: f64) -> f64 {
        match *self {
            Coupling::Zero => 0.0,
            Coupling::Sine { amplitude, frequency } => amplitude * (2.0 * PI * frequency * theta).sin(),
            Coupling::Bump(b) => b.jet(theta).v,
        }
    }

    /// `max_{k ≤ 3} sup |a^{(k)}|`.
    pub fn c3_size(&self) -> f64 {
        match *self {
            Coupling::Zero => 0.0,
            Coupling::Sine { amplitude, frequency } => {
                let w = 2.0 * PI * frequency.abs();
                amplitude.abs() * [1.0, w, w * w, w * w * w].into_iter().fold(0.0, f64::max)
            }
            Coupling::Bump(b) => b.c3_size(),
        }
    }

    /// Sine coupling of frequency 1 whose C³ size equals `epsilon`.
    pub fn sine_with_budget(epsilon: f64) -> Self {
        Coupling::Sine { amplitude: epsilon / (2.0 * PI).powi(3), frequency: 1.0 }
    }
}

/// `ψ(θ,y) = (S(θ), c - y² + a(θ))` with a declared C³ budget `ε` for `a`.
#[derive(Debug, Clone)]
pub struct FiberedSystem {
    base: BaseMap,
    c: f64,
    coupling: Coupling,
    epsilon: f64,
}

impl FiberedSystem {
    pub fn new(base: BaseMap, c: f64, coupling: Coupling, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return precondition("coupling budget must be nonnegative");
        }
        let size = coupling.c3_size();
        if size > epsilon * (1.0 + 1e-12) {
            return precondition(format!("coupling C3 size {size:.3e} exceeds declared epsilon {epsilon:.3e}"));
        }
        Ok(Self { base, c, coupling, epsilon })
    }

    /// Sixteen linear branches, `T(y) = c - y²` and a sine coupling using the
    /// whole budget.
    pub fn standard(c: f64, epsilon: f64) -> Result<Self> {
        Self::new(BaseMap::uniform_linear(16)?, c, Coupling::sine_with_budget(epsilon), epsilon)
    }

    pub fn base(&self) -> &BaseMap {
        &self.base
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `T_θ(y) = c - y² + a(θ)`.
    #[inline]
    pub fn fiber(&self, theta: f64, y: f64) -> f64 {
        self.c - y * y + self.coupling.eval(theta)
    }

    /// One step with the base digits below `2^-40` redrawn.
    #[inline]
    pub fn step_sampled<R: Rng + ?Sized>(&self, theta: f64, y: f64, rng: &mut R) -> (f64, f64) {
        let y1 = self.fiber(theta, y);
        let i = self.base.branch_index(theta).expect("sampled orbits stay in retained branches");
        let t = self.base.eval_branch(i, theta).clamp(f64::MIN_POSITIVE, 1.0);
        (refresh_digits(t, unit_open_closed(rng)), y1)
    }

    /// Exact base step, used on deterministic grids.
    #[inline]
    pub fn step_exact(&self, theta: f64, y: f64) -> (f64, f64) {
        let y1 = self.fiber(theta, y);
        let i = self.base.branch_index(theta).expect("grid points lie in retained branches");
        (self.base.eval_branch(i, theta).clamp(f64::MIN_POSITIVE, 1.0), y1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_enforced() {
        let s = FiberedSystem::standard(0.5, 0.01).unwrap();
        assert!((s.coupling().c3_size() - 0.01).abs() < 1e-15);
        let loud = Coupling::Sine { amplitude: 0.01, frequency: 1.0 };
        assert!(FiberedSystem::new(BaseMap::uniform_linear(16).unwrap(), 0.5, loud, 0.01).is_err());
    }
}
