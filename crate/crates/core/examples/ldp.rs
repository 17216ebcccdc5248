use viana::sampling::Streams;
use viana::skew::SkewSystem;
use viana::statistics::{large_deviations, Observable, Threshold};

fn main() -> viana::Result<()> {
    let sys = SkewSystem::reference(1e-2)?;
    let t = large_deviations(&sys, Observable::Theta, Threshold::StdMultiple(0.1), &[100, 1000], 1000, 1000, Streams::new(7))?;
    println!("mean {:.4}, std {:.4}, delta {:.4}", t.mean, t.std, t.delta);
    for r in &t.rows {
        println!("n = {:5}: tail {:.4} [{:.4}, {:.4}]", r.n, r.tail, r.lower, r.upper);
    }
    println!("strictly decreasing: {}", t.strictly_decreasing());
    Ok(())
}
