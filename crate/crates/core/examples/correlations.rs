use viana::sampling::Streams;
use viana::skew::SkewSystem;
use viana::statistics::{correlation_decay, Observable, CORRELATION_THRESHOLD};

fn main() -> viana::Result<()> {
    let sys = SkewSystem::reference(1e-2)?;
    for (h1, h2) in [(Observable::X, Observable::X), (Observable::Theta, Observable::Theta)] {
        let t = correlation_decay(&sys, h1, h2, 20, 5000, 20, 1000, Streams::new(7))?;
        println!("{h1}/{h2}: crossing lag {:?}, tau {:?}", t.crossing_lag(CORRELATION_THRESHOLD), t.tau);
        for (k, c) in t.lags.iter().zip(&t.correlation).take(6) {
            println!("  lag {k}: {c:+.4}");
        }
    }
    Ok(())
}
