use rand::Rng;
use serde::Serialize;

use super::window::{critical_window, m_of_alpha, window_half_width};
use crate::base_map::Itinerary;
use crate::curves::{strip_measure, AdmissibleCurve};
use crate::error::Result;
use crate::numerics::{fit_line, wilson, LineFit, BAND_Z};
use crate::sampling::{map_samples, Streams};
use crate::skew::SkewSystem;

/// One row of the deep-return table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeepTailRow {
    pub r: u32,
    /// Grid measure of `{θ : π_x φ^M(θ, Y(θ)) ∈ J(r-2)}`.
    pub measure: f64,
    pub lower: f64,
    pub upper: f64,
    /// Strip bound `C √(|J(r-2)|/α)`.
    pub strip_bound: f64,
    pub grid_error: f64,
    /// `r ≥ (1/2 - 2η) log(1/α)`.
    pub in_range: bool,
    /// Measure below one grid cell.
    pub censored: bool,
    /// Measure equal to one: the window still covers the whole image.
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeepReturnTail {
    pub m_iterates: u32,
    pub nodes: usize,
    pub rows: Vec<DeepTailRow>,
    /// Least squares of `log measure` against `r` over in-range rows that
    /// are neither censored nor saturated.
    pub fit: Option<LineFit>,
    /// Every consecutive pair of rows satisfies `lower[r+1] ≤ upper[r]`.
    pub nonincreasing_within_bands: bool,
    pub within_strip_bound: bool,
}

pub fn deep_return_tail(
    sys: &SkewSystem,
    curve: &AdmissibleCurve,
    r_grid: &[u32],
    eta: f64,
) -> Result<DeepReturnTail> {
    let alpha = sys.alpha();
    let big_m = m_of_alpha(alpha)?;
    let steps = big_m.max(1) as usize;
    let gate = (0.5 - 2.0 * eta) * (1.0 / alpha).ln();
    let mut rows = Vec::with_capacity(r_grid.len());
    let mut nodes = curve.len();
    for &r in r_grid {
        let w = critical_window(alpha, f64::from(r.saturating_sub(2)));
        let s = strip_measure(sys, curve, steps, w)?;
        nodes = s.nodes;
        let hits = (s.estimate * s.nodes as f64).round() as u64;
        let (lower, upper) = wilson(hits, s.nodes as u64, BAND_Z);
        rows.push(DeepTailRow {
            r,
            measure: s.estimate,
            lower,
            upper,
            strip_bound: s.sqrt_bound,
            grid_error: s.grid_error,
            in_range: f64::from(r) >= gate,
            censored: s.estimate < 1.0 / s.nodes as f64,
            saturated: s.estimate >= 1.0 - 1e-12,
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|row| row.in_range && !row.censored && !row.saturated)
        .map(|row| (f64::from(row.r), row.measure.ln()))
        .unzip();
    let nonincreasing = rows.windows(2).all(|w| w[1].lower <= w[0].upper);
    let within = rows.iter().all(|row| row.measure - row.grid_error <= row.strip_bound);
    Ok(DeepReturnTail {
        m_iterates: big_m,
        nodes,
        rows,
        fit: fit_line(&xs, &ys),
        nonincreasing_within_bands: nonincreasing,
        within_strip_bound: within,
    })
}

/// Outcome of checking that curve segments through deep returns stay in
/// `J(m-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Containment {
    pub deep_returns_found: usize,
    pub violations: usize,
    pub worst_ratio: f64,
}

/// For sampled curve points with a deep return at time `ν ≤ n`, push the
/// whole depth-`(ν+ℓ)` cylinder segment of the curve by `ν` steps and check
/// it lies in `J(m-1)`, where `m = ⌊√n⌋` and `ℓ = m - M`.
pub fn deep_return_containment(
    sys: &SkewSystem,
    spec_curve: &AdmissibleCurve,
    n: usize,
    samples: usize,
    segment_nodes: usize,
    streams: Streams,
) -> Result<Containment> {
    let alpha = sys.alpha();
    let m = (n as f64).sqrt().floor() as u32;
    let big_m = m_of_alpha(alpha)?;
    let ell = m.saturating_sub(big_m) as usize;
    let spec = spec_curve
        .spec()
        .cloned()
        .ok_or_else(|| crate::Error::Precondition("containment needs a closed-form curve".into()))?;
    let deep = window_half_width(alpha, f64::from(m));
    let outer = window_half_width(alpha, f64::from(m.saturating_sub(1)));
    let base = sys.base();
    let streams = streams.domain("containment");
    let results: Vec<Result<Option<f64>>> = map_samples(samples, |i| {
        let mut rng = streams.rng(i as u64);
        let theta = 1.0 - rng.gen::<f64>();
        let (_, y0, _) = spec.eval(theta);
        let (mut t, mut x) = (theta, y0);
        let mut nu = None;
        for k in 1..=n {
            let b = base.branch_index(t).ok_or(crate::Error::Truncation(t))?;
            x = sys.fiber().eval(t, x);
            t = base.eval_branch(b, t).clamp(f64::MIN_POSITIVE, 1.0);
            if x.abs() <= deep {
                nu = Some(k);
                break;
            }
        }
        let Some(nu) = nu else { return Ok(None) };
        let depth = nu + ell;
        let it = Itinerary::of_point(base, theta, depth)?;
        let cyl = base.cylinder(&it)?;
        let mut worst = 0.0f64;
        for k in 0..segment_nodes {
            let s = cyl.at((k as f64 + 0.5) / segment_nodes as f64);
            let (_, ys, _) = spec.eval(s);
            let (mut tt, mut xx) = (s, ys);
            for &sym in it.0.iter().take(nu) {
                xx = sys.fiber().eval(tt, xx);
                tt = base.eval_branch(sym, tt);
            }
            worst = worst.max(xx.abs() / outer);
        }
        Ok(Some(worst))
    });
    let mut out = Containment { deep_returns_found: 0, violations: 0, worst_ratio: 0.0 };
    for r in results {
        if let Some(w) = r? {
            out.deep_returns_found += 1;
            if w > 1.0 {
                out.violations += 1;
            }
            out.worst_ratio = out.worst_ratio.max(w);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_through_critical_curve() {
        let s = SkewSystem::reference(1e-2).unwrap();
        let c = AdmissibleCurve::constant(s.fiber().a0.sqrt(), 100_000, 1e-2);
        let r: Vec<u32> = (2..=10).collect();
        let t = deep_return_tail(&s, &c, &r, 0.25).unwrap();
        assert_eq!(t.m_iterates, 1);
        assert!(t.nonincreasing_within_bands);
        assert!(t.within_strip_bound);
        let fit = t.fit.unwrap();
        assert!(fit.slope <= -0.2, "{fit:?}");
        assert!(t.rows.iter().all(|row| row.measure > 0.0));
    }

    #[test]
    fn range_gate_flags_small_r() {
        let s = SkewSystem::reference(1e-2).unwrap();
        let c = AdmissibleCurve::constant(s.fiber().a0.sqrt(), 10_000, 1e-2);
        let t = deep_return_tail(&s, &c, &[1, 2, 3], 0.05).unwrap();
        assert!(!t.rows[0].in_range);
        assert!(t.rows[1].in_range);
    }

    #[test]
    fn zero_curve_stays_away_from_window() {
        let s = SkewSystem::reference(1e-2).unwrap();
        let c = AdmissibleCurve::constant(0.0, 10_000, 1e-2);
        let t = deep_return_tail(&s, &c, &[2, 3, 4], 0.25).unwrap();
        assert!(t.rows.iter().all(|row| row.censored));
        assert!(t.fit.is_none());
    }

    #[test]
    fn deep_segments_are_contained() {
        let s = SkewSystem::reference(1e-2).unwrap();
        let c = AdmissibleCurve::constant(s.fiber().a0.sqrt(), 16, 1e-2);
        let r = deep_return_containment(&s, &c, 16, 400, 32, Streams::new(1)).unwrap();
        assert!(r.deep_returns_found > 0);
        assert_eq!(r.violations, 0);
    }
}
