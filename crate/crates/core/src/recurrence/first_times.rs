use serde::Serialize;

use crate::error::{precondition, Result};
use crate::numerics::{fit_line, wilson, LineFit, BAND_Z};
use crate::sampling::{map_samples, Streams};
use crate::skew::SkewSystem;

/// Parameters of the two first-time functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstTimeParams {
    /// Expansion rate `c` in `E_v`.
    pub c_target: f64,
    /// Recurrence rate `ε` in `R`.
    pub epsilon: f64,
    /// Distance cutoff `δ` in `R`.
    pub delta: f64,
}

impl FirstTimeParams {
    /// `c = 0.46`, `ε = 0.16` and `δ = √α`.
    pub fn defaults(alpha: f64) -> Self {
        Self { c_target: 0.46, epsilon: 0.16, delta: alpha.sqrt() }
    }
}

/// Smallest singular value of `[[a, 0], [b, c]]`.
pub fn lower_triangular_conorm(a: f64, b: f64, c: f64) -> f64 {
    let det = (a * c).abs();
    let t = a * a + b * b + c * c;
    let disc = (t * t - 4.0 * det * det).max(0.0).sqrt();
    let smax = ((t + disc) / 2.0).sqrt();
    if smax == 0.0 {
        0.0
    } else {
        det / smax
    }
}

/// `-log dist_δ(x)`: `-log|x|` inside `(-δ, δ)`, zero outside.
#[inline]
pub fn log_recurrence_cost(x: f64, delta: f64) -> f64 {
    if x.abs() < delta {
        -x.abs().max(f64::MIN_POSITIVE).ln()
    } else {
        0.0
    }
}

/// First times of a single orbit, computed over `1..=horizon`.
///
/// `E` is the least `N` with `(1/n) Σ_{j<n} log co-norm Dφ ≥ c` for every
/// `N ≤ n ≤ horizon`; `R` is the least `N` with `(1/n) Σ_{j<n} -log dist_δ < ε`
/// for every such `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FirstTimes {
    pub expansion: usize,
    pub recurrence: usize,
}

pub fn first_times<R: rand::Rng + ?Sized>(
    sys: &SkewSystem,
    start: (f64, f64),
    p: FirstTimeParams,
    horizon: usize,
    rng: &mut R,
) -> FirstTimes {
    let base = sys.base();
    let (mut t, mut x) = start;
    let (mut se, mut sr) = (0.0, 0.0);
    let (mut last_e, mut last_r) = (0, 0);
    for n in 1..=horizon {
        let i = base.branch_index(t).expect("sampled orbits stay in retained branches");
        let d = base.branch_derivative(i, t);
        let fp = sys.fiber().partials(t, x);
        se += lower_triangular_conorm(d, fp.ft, fp.fx).max(f64::MIN_POSITIVE).ln();
        sr += log_recurrence_cost(x, p.delta);
        if se < p.c_target * n as f64 {
            last_e = n;
        }
        if sr >= p.epsilon * n as f64 {
            last_r = n;
        }
        (t, x) = sys.step_sampled(t, x, rng);
    }
    FirstTimes { expansion: last_e + 1, recurrence: last_r + 1 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRow {
    pub n: usize,
    pub tail_e: f64,
    pub e_lower: f64,
    pub e_upper: f64,
    pub tail_r: f64,
    pub r_lower: f64,
    pub r_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstTimeTails {
    pub params: FirstTimeParams,
    pub horizon: usize,
    pub samples: usize,
    pub rows: Vec<TailRow>,
    /// Fits of `log tail` against `√n` over rows with `n > 0`; empty rows
    /// enter at half a sample.
    pub fit_e: Option<LineFit>,
    pub fit_r: Option<LineFit>,
    pub nonincreasing: bool,
}

impl FirstTimeTails {
    pub fn decays(&self) -> bool {
        self.nonincreasing
            && self.fit_e.is_some_and(|f| f.slope < 0.0)
            && self.fit_r.is_some_and(|f| f.slope < 0.0)
    }
}

/// Empirical `Leb{E > n}` and `Leb{R > n}` with the horizon at twice the
/// largest `n`.
pub fn expansion_time_tails(
    sys: &SkewSystem,
    p: FirstTimeParams,
    n_grid: &[usize],
    samples: usize,
    streams: Streams,
) -> Result<FirstTimeTails> {
    if samples == 0 {
        return precondition("expansion_time_tails needs samples > 0");
    }
    let horizon = 2 * n_grid.iter().copied().max().unwrap_or(0);
    let streams = streams.domain("first-times");
    let times: Vec<FirstTimes> = map_samples(samples, |i| {
        let mut rng = streams.rng(i as u64);
        let start = sys.random_point(&mut rng);
        first_times(sys, start, p, horizon, &mut rng)
    });
    let total = samples as u64;
    let rows: Vec<TailRow> = n_grid
        .iter()
        .map(|&n| {
            let he = times.iter().filter(|t| t.expansion > n).count() as u64;
            let hr = times.iter().filter(|t| t.recurrence > n).count() as u64;
            let (e_lower, e_upper) = wilson(he, total, BAND_Z);
            let (r_lower, r_upper) = wilson(hr, total, BAND_Z);
            TailRow {
                n,
                tail_e: he as f64 / samples as f64,
                e_lower,
                e_upper,
                tail_r: hr as f64 / samples as f64,
                r_lower,
                r_upper,
            }
        })
        .collect();
    let floor = 0.5 / samples as f64;
    let fit = |pick: fn(&TailRow) -> f64| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = rows
            .iter()
            .filter(|r| r.n > 0)
            .map(|r| ((r.n as f64).sqrt(), pick(r).max(floor).ln()))
            .unzip();
        fit_line(&xs, &ys)
    };
    let mut sorted = rows.clone();
    sorted.sort_by_key(|r| r.n);
    let nonincreasing = sorted.windows(2).all(|w| w[1].tail_e <= w[0].tail_e && w[1].tail_r <= w[0].tail_r);
    Ok(FirstTimeTails {
        params: p,
        horizon,
        samples,
        fit_e: fit(|r| r.tail_e),
        fit_r: fit(|r| r.tail_r),
        nonincreasing,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_map::BaseMap;
    use crate::skew::FiberMap;

    #[test]
    fn conorm_matches_diagonal_and_product() {
        assert!((lower_triangular_conorm(16.0, 0.0, 0.5) - 0.5).abs() < 1e-15);
        let (a, b, c) = (16.0, 3.0, -1.2);
        let s = lower_triangular_conorm(a, b, c);
        let smax = (a * c).abs() / s;
        assert!((s * s + smax * smax - (a * a + b * b + c * c)).abs() < 1e-10);
    }

    #[test]
    fn zero_column_is_one() {
        let s = SkewSystem::reference(1e-2).unwrap();
        let t = expansion_time_tails(&s, FirstTimeParams::defaults(1e-2), &[0, 10], 50, Streams::new(2)).unwrap();
        assert_eq!(t.rows[0].tail_e, 1.0);
        assert_eq!(t.rows[0].tail_r, 1.0);
    }

    #[test]
    fn chebyshev_control_collapses() {
        let s = SkewSystem::new(BaseMap::uniform_linear(16).unwrap(), FiberMap::viana(2.0, 0.0)).unwrap();
        let p = FirstTimeParams { c_target: 0.5, epsilon: 0.16, delta: 0.1 };
        let t = expansion_time_tails(&s, p, &[100, 1000], 200, Streams::new(4)).unwrap();
        assert!(t.rows[1].tail_e <= 0.05, "{t:?}");
    }

    #[test]
    fn halving_epsilon_raises_tail() {
        let s = SkewSystem::reference(1e-2).unwrap();
        let p = FirstTimeParams::defaults(1e-2);
        let q = FirstTimeParams { epsilon: p.epsilon / 2.0, ..p };
        let grid = [10, 100, 400];
        let a = expansion_time_tails(&s, p, &grid, 200, Streams::new(8)).unwrap();
        let b = expansion_time_tails(&s, q, &grid, 200, Streams::new(8)).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert!(y.tail_r >= x.tail_r);
        }
    }
}
