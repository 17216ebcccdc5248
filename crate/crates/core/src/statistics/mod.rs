//! Monte Carlo statistics of the physical measure: Lyapunov exponents,
//! invariant density, correlations, large deviations and the central limit
//! theorem.
//!
//! Orbits start Lebesgue-random in `(0,1] × I₀`, discard a burn-in and then
//! feed Birkhoff sums of observables from a small fixed family.

mod clt;
mod correlations;
mod density;
mod deviations;
mod lyapunov;
mod observable;

pub use clt::{clt_check, ks_standard_normal, CltReport};
pub use correlations::{correlation_decay, CorrelationTable, CORRELATION_THRESHOLD};
pub use density::{chebyshev_bin_masses, invariant_density, transfer_defect, DensityHistogram, CONVERGENCE_TOL};
pub use deviations::{large_deviations, DeviationRow, DeviationTable, Threshold};
pub use lyapunov::{lyapunov_mc, ExponentSample, LyapunovReport, GENERIC_VECTOR};
pub use observable::{Observable, OBSERVABLE_FAMILY_VERSION};

use rand::Rng;

use crate::skew::SkewSystem;

/// Default burn-in before Birkhoff sums start.
pub const DEFAULT_BURN_IN: usize = 1000;

/// A Lebesgue-random start advanced by `burn_in` sampled steps.
pub(crate) fn burned_start<R: Rng + ?Sized>(sys: &SkewSystem, burn_in: usize, rng: &mut R) -> (f64, f64) {
    let (mut t, mut x) = sys.random_point(rng);
    for _ in 0..burn_in {
        (t, x) = sys.step_sampled(t, x, rng);
    }
    (t, x)
}

/// Values `h(z_0), …, h(z_{n-1})` along a burned-in sampled orbit.
pub(crate) fn observable_series<R: Rng + ?Sized>(
    sys: &SkewSystem,
    h: &Observable,
    burn_in: usize,
    n: usize,
    rng: &mut R,
) -> Vec<f64> {
    let (mut t, mut x) = burned_start(sys, burn_in, rng);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(h.eval(t, x));
        (t, x) = sys.step_sampled(t, x, rng);
    }
    out
}
