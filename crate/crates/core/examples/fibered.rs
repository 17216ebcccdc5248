//! Certify a trap for `c - y²` with `c = 0.5` under a small coupling and
//! measure the fiber exponents inside it.

use viana::fibered::{build_trap, srb_pushforward, trapped_exponents, FiberedSystem, TrapSearch};
use viana::numerics::summarize;
use viana::sampling::Streams;

fn main() -> viana::Result<()> {
    let fs = FiberedSystem::standard(0.5, 0.01)?;
    let region = build_trap(&fs, &TrapSearch::default())?;
    println!("cycle {:?}, period {}, radius {:.3e}, lambda {:.4}", region.cycle, region.period, region.radius, region.lambda);
    let s = summarize(&trapped_exponents(&fs, &region, 2000, 200, Streams::new(7)));
    println!("fiber exponents: mean {:.4}, max {:.4}", s.mean, s.max);
    let srb = srb_pushforward(&fs, &region, region.cycle[0], 2000, 100, Streams::new(8))?;
    println!("mean y {:.5}, theta-marginal L1 {:.4}", srb.mean_y, srb.theta_l1);
    Ok(())
}
