use super::AdmissibleCurve;
use crate::base_map::{gibbs_band, BaseMap};
use crate::error::{precondition, Result};
use crate::skew::{Interval, SkewSystem};

/// Minimum nodes per depth-(j-1) cylinder when the curve can be resampled.
pub const NODES_PER_CYLINDER: usize = 64;

/// `6 exp(dK/(d-1))`, the constant in `Leb ≤ C √(|I|/α)` for `j ≥ 2`.
pub fn strip_constant(base: &BaseMap) -> f64 {
    6.0 * gibbs_band(base).1
}

/// Estimated `Leb{θ : π_x φʲ(θ, Y(θ)) ∈ I}` with its bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripMeasure {
    pub j: usize,
    pub interval_len: f64,
    pub estimate: f64,
    /// Node spacing times the number of cells where the indicator changes.
    pub grid_error: f64,
    pub crossings: usize,
    /// Adjacent nodes in different depth-(j-1) cylinders.
    pub breaks: usize,
    pub nodes: usize,
    /// `6|I|/α + 2√(|I|/α)`; only meaningful for `j = 1`.
    pub single_step_bound: f64,
    /// `C √(|I|/α)` with `C` from [`strip_constant`].
    pub sqrt_bound: f64,
    pub constant: f64,
    /// Set when transitions occupy more than a quarter of the cells.
    pub resolution_warning: bool,
}

impl StripMeasure {
    /// The bound that applies to this `j`: both for `j = 1`, the
    /// square-root bound for `j ≥ 2`.
    pub fn bound(&self) -> f64 {
        if self.j == 1 {
            self.single_step_bound.min(self.sqrt_bound)
        } else {
            self.sqrt_bound
        }
    }

    /// `estimate - grid_error ≤ bound`.
    pub fn passes(&self) -> bool {
        self.estimate - self.grid_error <= self.bound()
    }
}

/// Length of `{s ∈ [0,1] : a + (b-a)s ∈ I}`.
fn segment_fraction(a: f64, b: f64, i: Interval) -> f64 {
    if a == b {
        return if i.contains(a) { 1.0 } else { 0.0 };
    }
    let (s0, s1) = ((i.lo - a) / (b - a), (i.hi - a) / (b - a));
    let (lo, hi) = if s0 < s1 { (s0, s1) } else { (s1, s0) };
    (hi.min(1.0) - lo.max(0.0)).max(0.0)
}

/// Grid estimate of the strip measure after `j` steps.
///
/// Nodes are iterated exactly; between neighbours in the same
/// depth-(j-1) cylinder the x-coordinate is interpolated linearly, and at
/// cylinder breaks each neighbour contributes half a cell. If the curve has
/// a closed form it is resampled to at least [`NODES_PER_CYLINDER`] nodes
/// per cylinder.
pub fn strip_measure(sys: &SkewSystem, c: &AdmissibleCurve, j: usize, interval: Interval) -> Result<StripMeasure> {
    if j == 0 {
        return precondition("strip measures need j >= 1");
    }
    if !(interval.len() >= 0.0) {
        return precondition("interval must have lo <= hi");
    }
    let base = sys.base();
    let b = base.branch_count() as u128;
    let cylinders = b.checked_pow(j as u32 - 1).ok_or_else(|| {
        crate::Error::Precondition(format!("depth {j} overflows the cylinder code"))
    })?;
    let want = (cylinders as usize).saturating_mul(NODES_PER_CYLINDER);
    let resampled;
    let curve = if want > c.len() {
        match c.resampled(want) {
            Some(r) => {
                resampled = r;
                &resampled
            }
            None => c,
        }
    } else {
        c
    };

    let n = curve.len();
    let mut xs = Vec::with_capacity(n);
    let mut codes = Vec::with_capacity(n);
    for k in 0..n {
        let (mut t, mut x) = (curve.theta[k], curve.y[k]);
        let mut code: u128 = 0;
        for step in 0..j {
            let i = base.branch_index(t).ok_or(crate::Error::Truncation(t))?;
            if step + 1 < j {
                code = code * b + i as u128;
            }
            x = sys.fiber().eval(t, x);
            t = base.eval_branch(i, t).clamp(f64::MIN_POSITIVE, 1.0);
        }
        xs.push(x);
        codes.push(code);
    }

    let h = 1.0 / n as f64;
    let inside = |x: f64| interval.contains(x);
    // End cells (0, θ_0] and (θ_{n-1}, 1] have width h/2.
    let mut measure = 0.5 * h * (f64::from(inside(xs[0]) as u8) + f64::from(inside(xs[n - 1]) as u8));
    let (mut crossings, mut breaks) = (0usize, 0usize);
    for k in 0..n - 1 {
        let (a, bb) = (xs[k], xs[k + 1]);
        let (ia, ib) = (inside(a), inside(bb));
        if codes[k] == codes[k + 1] {
            let frac = segment_fraction(a, bb, interval);
            measure += h * frac;
            if ia != ib || (!ia && frac > 0.0) {
                crossings += 1;
            }
        } else {
            breaks += 1;
            measure += 0.5 * h * (f64::from(ia as u8) + f64::from(ib as u8));
            if ia != ib {
                crossings += 1;
            }
        }
    }
    let r = interval.len() / curve.alpha;
    let constant = strip_constant(base);
    Ok(StripMeasure {
        j,
        interval_len: interval.len(),
        estimate: measure,
        grid_error: h * crossings as f64,
        crossings,
        breaks,
        nodes: n,
        single_step_bound: 6.0 * r + 2.0 * r.sqrt(),
        sqrt_bound: constant * r.sqrt(),
        constant,
        resolution_warning: 4 * crossings > n,
    })
}
