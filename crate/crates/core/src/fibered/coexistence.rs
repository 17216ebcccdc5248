use serde::{Deserialize, Serialize};

use super::{find_attractors, superattracting_period3, Attractor, PERIOD3_WINDOW};
use crate::base_map::{c3_distance, BaseMap, C3Distance};
use crate::error::{precondition, Error, Result};
use crate::sampling::Streams;
use crate::skew::{find_misiurewicz, Combinatorics, FiberBump, FiberMap, SkewSystem};
use crate::statistics::lyapunov_mc;

/// Inputs of the coexistence construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoexistenceConfig {
    pub branches: usize,
    /// Branch whose fixed point carries the bump.
    pub branch: usize,
    pub alpha: f64,
    /// Fiber parameter aimed for over the fixed point.
    pub target: f64,
    /// Bump half-width.
    pub width: f64,
    pub n: usize,
    pub samples: usize,
}

impl Default for CoexistenceConfig {
    fn default() -> Self {
        Self { branches: 16, branch: 8, alpha: 1e-2, target: 1.7548, width: 0.02, n: 10_000, samples: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoexistenceReport {
    pub p_star: f64,
    pub a0: f64,
    /// Fiber parameter over `p*` after the bump.
    pub a_prime: f64,
    pub bump_amplitude: f64,
    pub bump_width: f64,
    /// Closed-form C³ size of the bump.
    pub bump_c3: f64,
    /// Measured C³ distance of the bumped system from the unbumped one.
    pub distance: C3Distance,
    pub attractor: Attractor,
    /// `(1/n) Σ log|2x_j|` along the fiber over `p*` from the critical value.
    pub central_exponent: f64,
    pub fraction_positive: f64,
    pub fiber_exponent_mean: f64,
    pub superattracting: f64,
}

impl CoexistenceReport {
    pub fn passes(&self) -> bool {
        self.central_exponent <= -0.1 && self.fraction_positive >= 0.95
    }
}

/// Tune a bump at the fixed point `p* = i/(d-1)` of branch `i` so that the
/// fiber map over `p*` has an attracting cycle, then measure the exponent
/// over `p*` and the exponents of Lebesgue-random points.
pub fn coexistence_demo(cfg: &CoexistenceConfig, streams: Streams) -> Result<CoexistenceReport> {
    if cfg.branch >= cfg.branches || cfg.branches < 2 {
        return precondition("coexistence needs a branch index below the branch count");
    }
    let base = BaseMap::uniform_linear(cfg.branches)?;
    let p_star = cfg.branch as f64 / (cfg.branches - 1) as f64;
    if base.branch_index(p_star) != Some(cfg.branch) {
        return Err(Error::Structural(format!("p* = {p_star} is not in branch {}", cfg.branch)));
    }
    let a0 = find_misiurewicz(Combinatorics::CritToPeriod2, 1e-12)?;
    let plain = FiberMap::viana(a0, cfg.alpha);
    let bump = FiberBump { center: p_star, width: cfg.width, amplitude: cfg.target - plain.parameter(p_star) };
    let tuned = plain.with_bump(bump);
    let a_prime = tuned.parameter(p_star);
    let attractor = find_attractors(a_prime, 64, 1e-13)
        .map_err(|e| {
            Error::Precondition(format!(
                "{e}; retune the bump so the fiber parameter over p* lies in a hyperbolic window such as [{}, {}]",
                PERIOD3_WINDOW.0, PERIOD3_WINDOW.1
            ))
        })?
        .remove(0);
    let reference = SkewSystem::new(base.clone(), plain)?;
    let sys = SkewSystem::new(base, tuned)?;
    let distance = c3_distance(&reference, &sys, 100_000)?;
    let mut x = a_prime;
    let mut s = 0.0;
    for _ in 0..cfg.n {
        s += (2.0 * x.abs()).max(f64::MIN_POSITIVE).ln();
        x = tuned.eval(p_star, x);
    }
    let mc = lyapunov_mc(&sys, cfg.n, cfg.samples, streams.domain("coexistence"))?;
    Ok(CoexistenceReport {
        p_star,
        a0,
        a_prime,
        bump_amplitude: bump.amplitude,
        bump_width: bump.width,
        bump_c3: bump.c3_size(),
        distance,
        attractor,
        central_exponent: s / cfg.n as f64,
        fraction_positive: mc.fraction_fiber_positive,
        fiber_exponent_mean: mc.fiber.mean,
        superattracting: superattracting_period3(),
    })
}
