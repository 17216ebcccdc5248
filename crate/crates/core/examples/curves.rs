//! Transversality of a random admissible curve and its strip measures.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use viana::curves::{strip_measure, transversality_check, AdmissibleCurve};
use viana::skew::{Interval, SkewSystem};

fn main() -> viana::Result<()> {
    let sys = SkewSystem::reference(1e-3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let curve = AdmissibleCurve::random(&mut rng, 20_000, sys.alpha(), sys.trap());
    let t = transversality_check(&sys, &curve)?;
    println!("transversality: margin {:.3e}, {} violations out of {}", t.margin, t.violations, t.nodes);
    // Intervals centred on the image of one curve node, so they are hit.
    let k = curve.len() / 3;
    let (mut t, mut x) = (curve.theta[k], curve.y[k]);
    for j in 1..=3 {
        (t, x) = sys.step(t, x)?;
        for w in [1e-4, 1e-3, 1e-2] {
            let s = strip_measure(&sys, &curve, j, Interval::new(x - w / 2.0, x + w / 2.0))?;
            println!("j = {j} |I| = {w:.0e}: measure {:.3e} bound {:.3e} pass {}", s.estimate, s.bound(), s.passes());
        }
    }
    Ok(())
}
