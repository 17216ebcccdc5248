use viana::sampling::Streams;
use viana::skew::SkewSystem;
use viana::statistics::lyapunov_mc;

fn main() -> viana::Result<()> {
    let sys = SkewSystem::reference(1e-2)?;
    let rep = lyapunov_mc(&sys, 2000, 200, Streams::new(7))?;
    println!("base exponent  {:.4} (log 16 = {:.4})", rep.base.mean, 16f64.ln());
    println!("fiber exponent {:.4} median, {:.4} min", rep.fiber.median, rep.fiber.min);
    println!("fraction positive {:.3}", rep.fraction_fiber_positive);
    Ok(())
}
