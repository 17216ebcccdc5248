//! Invariant density of the control map against the Chebyshev density.

use viana::config::SystemConfig;
use viana::sampling::Streams;
use viana::statistics::{chebyshev_bin_masses, invariant_density};

fn main() -> viana::Result<()> {
    let control = SystemConfig::default().control()?;
    let trap = control.trap();
    let h = invariant_density(&control, 1000, 5000, 20, 50, 40, Streams::new(7))?;
    let reference = chebyshev_bin_masses(trap.lo, trap.hi, 50);
    println!("x-marginal L1 distance from Chebyshev: {:.4}", h.x_l1(&reference));
    println!("theta-marginal L1 distance from uniform: {:.4}", h.theta_l1_uniform());
    for (c, m) in h.x_centers().iter().zip(h.x_marginal()).step_by(5) {
        println!("  x = {c:+.3}: {m:.4}");
    }
    Ok(())
}
