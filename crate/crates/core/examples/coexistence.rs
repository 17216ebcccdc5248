//! Bump the fiber parameter over a fixed point of the base into the
//! period-3 window while Lebesgue-random points keep positive exponents.

use viana::fibered::{coexistence_demo, CoexistenceConfig};
use viana::sampling::Streams;

fn main() -> viana::Result<()> {
    let cfg = CoexistenceConfig { n: 2000, samples: 200, ..Default::default() };
    let r = coexistence_demo(&cfg, Streams::new(7))?;
    println!("p* = {:.6}, a' = {:.6}, bump C3 size {:.3e}", r.p_star, r.a_prime, r.bump_c3);
    println!("attracting cycle of period {} with multiplier {:.4}", r.attractor.period, r.attractor.multiplier);
    println!("central exponent {:.4}, fraction positive {:.3}", r.central_exponent, r.fraction_positive);
    Ok(())
}
