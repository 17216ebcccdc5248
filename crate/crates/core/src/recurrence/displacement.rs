use serde::Serialize;

use crate::curves::AdmissibleCurve;
use crate::error::{precondition, Result};
use crate::skew::SkewSystem;

/// Mass floor `ζ` for both collections.
pub const ZETA: f64 = 1.0 / 16.0;

/// Two branch collections whose one-step images of the curve are vertically
/// separated: every segment over `low` lies below every segment over `high`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Displacement {
    /// The collection of smaller Lebesgue mass.
    pub p1: Vec<usize>,
    pub p2: Vec<usize>,
    pub mass1: f64,
    pub mass2: f64,
    /// Guaranteed pointwise gap between the two collections, after
    /// subtracting the sampling slack.
    pub separation: f64,
    pub threshold: f64,
}

impl Displacement {
    pub fn satisfies_claim(&self, alpha: f64) -> bool {
        self.separation >= alpha / 100.0
            && self.mass1 >= ZETA
            && self.mass2 >= self.mass1
            && self.mass2 <= 1.0 - ZETA
            && self.p1.iter().all(|i| !self.p2.contains(i))
    }
}

/// Range of `Z₁ = f(θ, Y(θ))` over each branch, widened by the grid slack.
fn branch_ranges(sys: &SkewSystem, curve: &AdmissibleCurve) -> Result<(Vec<(f64, f64)>, f64)> {
    let base = sys.base();
    let n = base.branch_count();
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
    let mut slope: f64 = 0.0;
    let mut max_gap: f64 = 0.0;
    let mut prev = 0.0;
    for k in 0..curve.len() {
        let (t, y, dy) = (curve.theta[k], curve.y[k], curve.dy[k]);
        let Some(i) = base.branch_index(t) else { continue };
        let p = sys.fiber().partials(t, y);
        let z = p.f;
        slope = slope.max((p.ft + p.fx * dy).abs());
        let r = &mut ranges[i];
        r.0 = r.0.min(z);
        r.1 = r.1.max(z);
        max_gap = max_gap.max(t - prev);
        prev = t;
    }
    max_gap = max_gap.max(1.0 - prev);
    if ranges.iter().any(|r| r.0 > r.1) {
        return precondition("curve grid leaves a branch without nodes");
    }
    // Between nodes, and toward branch ends, Z₁ moves by at most slope · gap.
    let slack = slope * max_gap;
    Ok((ranges, slack))
}

/// Split the branches by a horizontal threshold so that the one-step images
/// over the two sides are separated, choosing the most balanced split.
pub fn displacement_partitions(sys: &SkewSystem, curve: &AdmissibleCurve) -> Result<Displacement> {
    let base = sys.base();
    let part = base.partition();
    if !sys.fiber().is_sine_family() {
        return precondition("displacement needs the sine fiber family");
    }
    if part.max_width() > 1.0 / 16.0 + 1e-12 || part.residual_mass() > 0.0 {
        return precondition("displacement needs a finite partition with widths <= 1/16");
    }
    let alpha = sys.alpha();
    let (ranges, slack) = branch_ranges(sys, curve)?;
    let half = alpha / 200.0 + slack;
    let mut candidates: Vec<f64> = ranges
        .iter()
        .flat_map(|&(lo, hi)| [hi + half, lo - half])
        .collect();
    candidates.sort_by(f64::total_cmp);
    let mut best: Option<(f64, f64, Displacement)> = None;
    for &tau in &candidates {
        let low: Vec<usize> = (0..ranges.len()).filter(|&i| ranges[i].1 + half <= tau).collect();
        let high: Vec<usize> = (0..ranges.len()).filter(|&i| ranges[i].0 - half >= tau).collect();
        if low.is_empty() || high.is_empty() {
            continue;
        }
        let top_low = low.iter().map(|&i| ranges[i].1).fold(f64::NEG_INFINITY, f64::max);
        let bottom_high = high.iter().map(|&i| ranges[i].0).fold(f64::INFINITY, f64::min);
        let sep = bottom_high - top_low - 2.0 * slack;
        let ml: f64 = low.iter().map(|&i| part.width(i)).sum();
        let mh: f64 = high.iter().map(|&i| part.width(i)).sum();
        let balance = ml.min(mh);
        let better = match &best {
            None => true,
            Some((b, s, _)) => balance > *b + 1e-15 || ((balance - *b).abs() <= 1e-15 && sep > *s),
        };
        if better {
            let (p1, p2, mass1, mass2) = if ml <= mh { (low, high, ml, mh) } else { (high, low, mh, ml) };
            best = Some((balance, sep, Displacement { p1, p2, mass1, mass2, separation: sep, threshold: tau }));
        }
    }
    best.map(|b| b.2)
        .ok_or_else(|| crate::Error::Structural("no separating threshold between branch images".into()))
}
