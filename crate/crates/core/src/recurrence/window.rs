use crate::error::{precondition, Result};
use crate::skew::Interval;

/// Half-width `√α e^{-r}` of `J(r)`.
pub fn window_half_width(alpha: f64, r: f64) -> f64 {
    alpha.sqrt() * (-r).exp()
}

/// `J(r) = [-√α e^{-r}, √α e^{-r}]`.
pub fn critical_window(alpha: f64, r: f64) -> Interval {
    debug_assert!(r >= 0.0);
    let h = window_half_width(alpha, r);
    Interval::new(-h, h)
}

/// The largest `M` with `32^M α ≤ 1`.
pub fn m_of_alpha(alpha: f64) -> Result<u32> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return precondition("m_of_alpha needs 0 < alpha < 1");
    }
    let mut m = ((1.0 / alpha).ln() / 32f64.ln()).floor().max(0.0) as u32;
    while 32f64.powi(m as i32 + 1) * alpha <= 1.0 {
        m += 1;
    }
    while m > 0 && 32f64.powi(m as i32) * alpha > 1.0 {
        m -= 1;
    }
    Ok(m)
}

/// `max{r < m : x ∈ J(r)}`, or `None` when `x ∉ J(0)`.
pub fn return_depth(alpha: f64, x: f64, m: u32) -> Option<u32> {
    let ax = x.abs();
    let s = alpha.sqrt();
    if ax > s {
        return None;
    }
    if m == 0 {
        return Some(0);
    }
    if ax == 0.0 {
        return Some(m - 1);
    }
    let mut r = ((s / ax).ln().floor().max(0.0) as u64).min(u64::from(m - 1)) as u32;
    while r + 1 < m && ax <= window_half_width(alpha, f64::from(r + 1)) {
        r += 1;
    }
    while r > 0 && ax > window_half_width(alpha, f64::from(r)) {
        r -= 1;
    }
    Some(r)
}
