use viana::sampling::Streams;
use viana::skew::SkewSystem;
use viana::statistics::{clt_check, Observable};

fn main() -> viana::Result<()> {
    let sys = SkewSystem::reference(1e-2)?;
    let r = clt_check(&sys, Observable::X, 2000, 300, 1000, Streams::new(7))?;
    println!("mean {:.4}, sigma {:.4}, KS distance {:.4}", r.mean, r.sigma, r.ks);
    Ok(())
}
