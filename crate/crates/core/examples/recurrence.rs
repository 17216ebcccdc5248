//! Deep-return tail and first-time tails for a small `alpha`.

use viana::curves::AdmissibleCurve;
use viana::recurrence::{deep_return_tail, expansion_time_tails, FirstTimeParams};
use viana::sampling::Streams;
use viana::skew::SkewSystem;

fn main() -> viana::Result<()> {
    let alpha = 1e-2;
    let sys = SkewSystem::reference(alpha)?;
    let curve = AdmissibleCurve::constant(sys.fiber().a0.sqrt(), 50_000, alpha);
    let r_grid: Vec<u32> = (2..=10).collect();
    let tail = deep_return_tail(&sys, &curve, &r_grid, 0.1)?;
    for row in &tail.rows {
        println!("r = {:2}: measure {:.3e} (strip bound {:.3e})", row.r, row.measure, row.strip_bound);
    }
    if let Some(fit) = tail.fit {
        println!("log-measure slope {:.3}", fit.slope);
    }

    let t = expansion_time_tails(&sys, FirstTimeParams::defaults(alpha), &[100, 1000], 200, Streams::new(7))?;
    for row in &t.rows {
        println!("n = {:5}: P(E > n) = {:.3}, P(R > n) = {:.3}", row.n, row.tail_e, row.tail_r);
    }
    Ok(())
}
