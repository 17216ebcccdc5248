use rand::Rng;
use serde::Serialize;

use super::{find_attractors, FiberedSystem};
use crate::error::{Error, Result};
use crate::sampling::{map_samples, unit_open_closed, Streams};
use crate::skew::Interval;

/// Grid settings for trap certification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapSearch {
    /// Candidate radii, tried in increasing order.
    pub radii: Vec<f64>,
    pub x_grid: usize,
    pub y_grid: usize,
    /// Required clearance of `T^N(U_i)` from `∂U_i`, relative to the radius.
    pub margin: f64,
    /// Radius of the neighbourhood `V` of the critical point.
    pub v_radius: f64,
    pub capture_cap: usize,
}

impl Default for TrapSearch {
    fn default() -> Self {
        let radii = (0..48).map(|k| 1e-4 * 1.25f64.powi(k)).collect();
        Self { radii, x_grid: 1000, y_grid: 201, margin: 1e-3, v_radius: 0.05, capture_cap: 1000 }
    }
}

/// Certified neighbourhoods `U_i = (p_i - r, p_i + r)` of an attracting
/// cycle with `T_θ^N(U_i) ⊂ U_i` and `|(T_θ^N)'| ≤ λ^N` on every tested
/// coupling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapRegion {
    pub cycle: Vec<f64>,
    /// `N`, the cycle period.
    pub period: usize,
    pub multiplier: f64,
    pub radius: f64,
    pub lambda: f64,
    /// Smallest observed clearance of the images from `∂U_i`.
    pub clearance: f64,
    pub epsilon: f64,
    pub v_radius: f64,
    /// Steps after which every grid point of `(0,1] × V` lies in `U`.
    pub capture_steps: Option<usize>,
}

impl TrapRegion {
    pub fn intervals(&self) -> Vec<Interval> {
        self.cycle.iter().map(|&p| Interval::new(p - self.radius, p + self.radius)).collect()
    }

    /// Index of the `U_i` containing `y` (open intervals).
    pub fn component(&self, y: f64) -> Option<usize> {
        self.cycle.iter().position(|&p| (y - p).abs() < self.radius)
    }

    pub fn contains(&self, y: f64) -> bool {
        self.component(y).is_some()
    }
}

/// Worst clearance and largest `|(T^N)'|` over one scenario.
fn scan<F>(p: f64, r: f64, n: usize, y_grid: usize, mut step: F) -> (f64, f64)
where
    F: FnMut(usize, f64) -> f64,
{
    let mut clearance = f64::INFINITY;
    let mut dmax: f64 = 0.0;
    let h = 2.0 * r / (y_grid - 1) as f64;
    let mut pts = Vec::with_capacity(y_grid);
    for k in 0..y_grid {
        let y0 = p - r + k as f64 * h;
        let (mut y, mut d) = (y0, 1.0f64);
        for j in 0..n {
            d *= 2.0 * y.abs();
            y = step(j, y);
        }
        dmax = dmax.max(d);
        pts.push(y);
    }
    // Between grid nodes the image moves by at most dmax · h/2.
    let slack = dmax * h / 2.0;
    for y in pts {
        clearance = clearance.min(r - (y - p).abs() - slack);
    }
    (clearance, dmax)
}

fn certify(fs: &FiberedSystem, cycle: &[f64], r: f64, s: &TrapSearch) -> Option<(f64, f64)> {
    let n = cycle.len();
    let eps = fs.epsilon();
    let c = fs.c();
    let mut clearance = f64::INFINITY;
    let mut dmax: f64 = 0.0;
    for &p in cycle {
        for kappa in [eps, -eps] {
            let (cl, d) = scan(p, r, n, s.y_grid, |_, y| c - y * y + kappa);
            clearance = clearance.min(cl);
            dmax = dmax.max(d);
        }
    }
    if clearance < s.margin * r || dmax >= 1.0 {
        return None;
    }
    let per: Vec<(f64, f64)> = map_samples(s.x_grid, |k| {
        let theta0 = (k as f64 + 0.5) / s.x_grid as f64;
        let mut cl = f64::INFINITY;
        let mut dm: f64 = 0.0;
        for &p in cycle {
            let mut thetas = Vec::with_capacity(n);
            let mut t = theta0;
            for _ in 0..n {
                thetas.push(t);
                t = fs.step_exact(t, 0.0).0;
            }
            let (a, b) = scan(p, r, n, s.y_grid, |j, y| fs.fiber(thetas[j], y));
            cl = cl.min(a);
            dm = dm.max(b);
        }
        (cl, dm)
    });
    for (a, b) in per {
        clearance = clearance.min(a);
        dmax = dmax.max(b);
    }
    if clearance < s.margin * r || dmax >= 1.0 {
        return None;
    }
    Some((dmax.powf(1.0 / n as f64), clearance))
}

fn capture_steps(fs: &FiberedSystem, region: &TrapRegion, s: &TrapSearch) -> Option<usize> {
    let vy = 21;
    let per: Vec<Option<usize>> = map_samples(s.x_grid, |k| {
        let theta0 = (k as f64 + 0.5) / s.x_grid as f64;
        let mut worst = 0;
        for j in 0..vy {
            let y0 = -s.v_radius + 2.0 * s.v_radius * j as f64 / (vy - 1) as f64;
            let (mut t, mut y) = (theta0, y0);
            let mut hit = None;
            for step in 1..=s.capture_cap {
                (t, y) = fs.step_exact(t, y);
                if region.contains(y) {
                    hit = Some(step);
                    break;
                }
            }
            worst = worst.max(hit?);
        }
        Some(worst)
    });
    per.into_iter().try_fold(0, |acc, h| h.map(|v| acc.max(v)))
}

/// Certify the smallest radius in the search grid for the attracting cycle
/// of `T`, testing constant couplings `±ε` and the actual coupling on a grid
/// of base points.
pub fn build_trap(fs: &FiberedSystem, search: &TrapSearch) -> Result<TrapRegion> {
    let att = find_attractors(fs.c(), 64, 1e-13)?.remove(0);
    let sep = if att.period > 1 {
        let mut pts = att.cycle.clone();
        pts.sort_by(f64::total_cmp);
        pts.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    } else {
        f64::INFINITY
    };
    for &r in &search.radii {
        if 2.0 * r >= sep {
            break;
        }
        if let Some((lambda, clearance)) = certify(fs, &att.cycle, r, search) {
            let mut region = TrapRegion {
                cycle: att.cycle.clone(),
                period: att.period,
                multiplier: att.multiplier,
                radius: r,
                lambda,
                clearance,
                epsilon: fs.epsilon(),
                v_radius: search.v_radius,
                capture_steps: None,
            };
            region.capture_steps = capture_steps(fs, &region, search);
            return Ok(region);
        }
    }
    Err(Error::NonHyperbolic(format!(
        "no radius certifies a trap for c = {} with epsilon = {}; epsilon is too large for this T",
        fs.c(),
        fs.epsilon()
    )))
}

/// Random trapped orbits checked every `N` steps; returns
/// `(exits, checks)`.
pub fn trap_invariance(
    fs: &FiberedSystem,
    region: &TrapRegion,
    samples: usize,
    steps: usize,
    streams: Streams,
) -> (usize, usize) {
    let streams = streams.domain("trap-invariance");
    let n = region.period;
    let per: Vec<(usize, usize)> = map_samples(samples, |i| {
        let mut rng = streams.rng(i as u64);
        let comp = rng.gen_range(0..region.cycle.len());
        let p = region.cycle[comp];
        let mut t = unit_open_closed(&mut rng);
        let mut y = p + region.radius * (2.0 * rng.gen::<f64>() - 1.0);
        let (mut exits, mut checks) = (0, 0);
        for k in 1..=steps {
            (t, y) = fs.step_sampled(t, y, &mut rng);
            if k % n == 0 {
                checks += 1;
                if (y - p).abs() >= region.radius {
                    exits += 1;
                    y = p;
                }
            }
        }
        (exits, checks)
    });
    per.into_iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}
