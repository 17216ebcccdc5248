use serde::Serialize;

use crate::error::{precondition, Error, Result};

/// Parameter range `[1.75, 1.7685]` of the period-3 window of `c - y²`.
pub const PERIOD3_WINDOW: (f64, f64) = (1.75, 1.7685);

/// An attracting cycle of `T(y) = c - y²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Attractor {
    /// Cycle points in orbit order, starting from the one nearest the
    /// critical point.
    pub cycle: Vec<f64>,
    pub period: usize,
    /// `∏ T'(p_i) = ∏ (-2 p_i)`.
    pub multiplier: f64,
}

const CRITICAL_CAP: usize = 200_000;

fn quad(c: f64, y: f64) -> f64 {
    c - y * y
}

/// Newton on `T^p(y) - y`.
fn polish(c: f64, mut y: f64, p: usize, tol: f64) -> Option<f64> {
    for _ in 0..60 {
        let (mut z, mut d) = (y, 1.0);
        for _ in 0..p {
            d *= -2.0 * z;
            z = quad(c, z);
        }
        let g = z - y;
        if g.abs() <= tol {
            return Some(y);
        }
        let dg = d - 1.0;
        if dg == 0.0 || !dg.is_finite() {
            return None;
        }
        y -= g / dg;
    }
    None
}

/// Attracting cycles of `c - y²`, found by following the critical orbit.
///
/// A quadratic map has at most one attracting cycle and it attracts the
/// critical point, so the list has at most one entry. Parameters whose
/// critical orbit does not settle on an attracting cycle are rejected as
/// non-hyperbolic.
pub fn find_attractors(c: f64, max_period: usize, tol: f64) -> Result<Vec<Attractor>> {
    if max_period == 0 || max_period > 64 {
        return precondition("find_attractors needs 1 <= max_period <= 64");
    }
    if !(c > -0.25 && c <= 2.0) {
        return precondition("find_attractors needs -1/4 < c <= 2 so the critical orbit is bounded");
    }
    let detect = tol.max(1e-13) * 1e3;
    let mut y = 0.0;
    let mut history = Vec::with_capacity(max_period + 1);
    let mut steps = 0;
    while steps < CRITICAL_CAP {
        for _ in 0..1000 {
            y = quad(c, y);
        }
        steps += 1000;
        history.clear();
        history.push(y);
        let mut z = y;
        for _ in 0..max_period {
            z = quad(c, z);
            history.push(z);
        }
        let Some(p) = (1..=max_period).find(|&p| (history[p] - history[0]).abs() < detect) else { continue };
        // A point of the repelling cycle hit exactly still passes detection;
        // the multiplier test rejects it below.
        let Some(p0) = polish(c, history[0], p, tol) else { continue };
        let mut cycle = Vec::with_capacity(p);
        let mut w = p0;
        let mut mult = 1.0;
        for _ in 0..p {
            cycle.push(w);
            mult *= -2.0 * w;
            w = quad(c, w);
        }
        if mult.abs() >= 1.0 {
            return Err(Error::NonHyperbolic(format!(
                "critical orbit of c = {c} lands on a cycle of period {p} with multiplier {mult:.4}"
            )));
        }
        let start = (0..p).min_by(|&a, &b| cycle[a].abs().total_cmp(&cycle[b].abs())).unwrap_or(0);
        cycle.rotate_left(start);
        return Ok(vec![Attractor { cycle, period: p, multiplier: mult }]);
    }
    Err(Error::NonHyperbolic(format!(
        "critical orbit of c = {c} did not settle on a cycle of period <= {max_period}"
    )))
}

/// The parameter in the period-3 window where the critical point is
/// periodic: the root of `c² - c - √c = 0` near 1.7549.
pub fn superattracting_period3() -> f64 {
    let g = |c: f64| c * c - c - c.sqrt();
    let (mut lo, mut hi) = (1.7, 1.8);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(lo) * g(mid) <= 0.0 { hi = mid } else { lo = mid }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_at_one_half() {
        let a = find_attractors(0.5, 16, 1e-13).unwrap();
        let ystar = (3f64.sqrt() - 1.0) / 2.0;
        assert_eq!(a[0].period, 1);
        assert!((a[0].cycle[0] - ystar).abs() < 1e-12);
        assert!((a[0].multiplier + 2.0 * ystar).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_is_not_hyperbolic() {
        assert!(matches!(find_attractors(2.0, 16, 1e-12), Err(Error::NonHyperbolic(_))));
    }

    #[test]
    fn misiurewicz_is_not_hyperbolic() {
        let a0 = crate::skew::find_misiurewicz(crate::skew::Combinatorics::CritToPeriod2, 1e-12).unwrap();
        assert!(find_attractors(a0, 32, 1e-12).is_err());
    }

    #[test]
    fn period_three_window() {
        let cs = superattracting_period3();
        assert!((cs - 1.754_877_666_246_693).abs() < 1e-12, "{cs}");
        let a = find_attractors(1.7548, 16, 1e-13).unwrap();
        assert_eq!(a[0].period, 3);
        assert!(a[0].multiplier.abs() < 0.1);
        assert!(a[0].cycle[0].abs() < 0.05);
        let b = find_attractors(1.76, 16, 1e-13).unwrap();
        assert_eq!(b[0].period, 3);
        assert!(b[0].multiplier.abs() < 1.0);
    }

    #[test]
    fn period_two() {
        // 3/4 < c < 5/4: attracting 2-cycle with multiplier 4(1 - c).
        let a = find_attractors(1.0, 8, 1e-13).unwrap();
        assert_eq!(a[0].period, 2);
        assert!(a[0].multiplier.abs() < 1e-9);
        let b = find_attractors(1.1, 8, 1e-13).unwrap();
        assert!((b[0].multiplier - 4.0 * (1.0 - 1.1)).abs() < 1e-9);
    }
}
