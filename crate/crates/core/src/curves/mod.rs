//! Admissible curves `x = Y(θ)` with `|Y'|, |Y''| ≤ α`, their pushforward
//! under the skew product and the strip-measure estimates built on top.

mod strip;

pub use strip::{strip_constant, strip_measure, StripMeasure, NODES_PER_CYLINDER};

use std::f64::consts::PI;

use rand::Rng;

use crate::base_map::{BaseMap, Itinerary};
use crate::error::{precondition, Result};
use crate::skew::{Interval, SkewSystem};

/// Default number of curve nodes.
pub const DEFAULT_NODES: usize = 100_000;

/// Closed-form curve families; derivatives are exact.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveSpec {
    Constant(f64),
    /// `c0 + slope θ + Σ a_k sin(2π n_k θ + φ_k)`.
    Trig { c0: f64, slope: f64, modes: Vec<(f64, u32, f64)> },
}

impl CurveSpec {
    /// `(Y, Y', Y'')` at `θ`.
    pub fn eval(&self, theta: f64) -> (f64, f64, f64) {
        match self {
            CurveSpec::Constant(c) => (*c, 0.0, 0.0),
            CurveSpec::Trig { c0, slope, modes } => {
                let mut y = c0 + slope * theta;
                let mut d1 = *slope;
                let mut d2 = 0.0;
                for &(a, n, phi) in modes {
                    let w = 2.0 * PI * f64::from(n);
                    let (s, c) = (w * theta + phi).sin_cos();
                    y += a * s;
                    d1 += a * w * c;
                    d2 -= a * w * w * s;
                }
                (y, d1, d2)
            }
        }
    }

    /// Upper bounds on `sup|Y'|` and `sup|Y''|` over the line.
    fn derivative_bounds(&self) -> (f64, f64) {
        match self {
            CurveSpec::Constant(_) => (0.0, 0.0),
            CurveSpec::Trig { slope, modes, .. } => {
                let mut b1 = slope.abs();
                let mut b2 = 0.0;
                for &(a, n, _) in modes {
                    let w = 2.0 * PI * f64::from(n);
                    b1 += a.abs() * w;
                    b2 += a.abs() * w * w;
                }
                (b1, b2)
            }
        }
    }

    /// A random trigonometric curve with derivative bounds at most `α`,
    /// centred so its graph stays in `trap`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, alpha: f64, trap: Interval) -> Self {
        let count = rng.gen_range(1..=3);
        let modes: Vec<(f64, u32, f64)> = (0..count)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(1..=3), rng.gen_range(0.0..2.0 * PI)))
            .collect();
        let slope = rng.gen_range(-1.0..1.0);
        let raw = CurveSpec::Trig { c0: 0.0, slope, modes };
        let (b1, b2) = raw.derivative_bounds();
        let scale = alpha * rng.gen_range(0.5..1.0) / b1.max(b2);
        let CurveSpec::Trig { slope, modes, .. } = raw else { unreachable!() };
        // Y - c0 is bounded by |slope| + Σ|a_k| ≤ sup|Y'| ≤ α.
        let c0 = rng.gen_range((trap.lo + alpha)..(trap.hi - alpha));
        CurveSpec::Trig {
            c0,
            slope: slope * scale,
            modes: modes.into_iter().map(|(a, n, p)| (a * scale, n, p)).collect(),
        }
    }
}

/// A curve sampled on `θ_k = (k + 1/2)/G`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleCurve {
    pub theta: Vec<f64>,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
    pub d2y: Vec<f64>,
    pub alpha: f64,
    spec: Option<CurveSpec>,
}

impl AdmissibleCurve {
    pub fn sample(spec: CurveSpec, nodes: usize, alpha: f64) -> Self {
        let g = nodes.max(1);
        let mut c = Self {
            theta: Vec::with_capacity(g),
            y: Vec::with_capacity(g),
            dy: Vec::with_capacity(g),
            d2y: Vec::with_capacity(g),
            alpha,
            spec: None,
        };
        for k in 0..g {
            let t = (k as f64 + 0.5) / g as f64;
            let (y, d1, d2) = spec.eval(t);
            c.theta.push(t);
            c.y.push(y);
            c.dy.push(d1);
            c.d2y.push(d2);
        }
        c.spec = Some(spec);
        c
    }

    pub fn constant(c0: f64, nodes: usize, alpha: f64) -> Self {
        Self::sample(CurveSpec::Constant(c0), nodes, alpha)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, nodes: usize, alpha: f64, trap: Interval) -> Self {
        Self::sample(CurveSpec::random(rng, alpha, trap), nodes, alpha)
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn spec(&self) -> Option<&CurveSpec> {
        self.spec.as_ref()
    }

    /// The same closed-form curve on a different uniform grid.
    pub fn resampled(&self, nodes: usize) -> Option<Self> {
        self.spec.clone().map(|s| Self::sample(s, nodes, self.alpha))
    }

    /// `max|Y'|/α` and `max|Y''|/α` over the nodes.
    pub fn derivative_ratios(&self) -> (f64, f64) {
        let m1 = self.dy.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let m2 = self.d2y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (m1 / self.alpha, m2 / self.alpha)
    }

    /// Node-exact admissibility with a relative tolerance.
    pub fn is_admissible(&self, trap: Interval, rel_tol: f64) -> bool {
        let (r1, r2) = self.derivative_ratios();
        let lim = 1.0 + rel_tol;
        r1 <= lim && r2 <= lim && self.y.iter().all(|&y| trap.contains(y))
    }
}

/// A curve pushed through one branch in both parametrizations.
#[derive(Debug, Clone, PartialEq)]
pub struct PushedCurve {
    pub branch: usize,
    /// Graph over `θ' = g(θ)`.
    pub image: AdmissibleCurve,
    pub source_theta: Vec<f64>,
    /// `Ỹ₁(θ) = f(θ, Y(θ))` and its θ-derivatives.
    pub source_y: Vec<f64>,
    pub source_dy: Vec<f64>,
    pub source_d2y: Vec<f64>,
}

impl PushedCurve {
    /// `max|Y₁'|/α` and `max|Y₁''|/α` for the image parametrization.
    pub fn derivative_ratios(&self) -> (f64, f64) {
        self.image.derivative_ratios()
    }

    /// Largest mismatch between `Y₁∘g` and `Ỹ₁` and their chain-rule
    /// derivatives, relative to max(1, size).
    pub fn consistency_defect(&self, base: &BaseMap) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..self.source_theta.len() {
            let j = base.branch_jet(self.branch, self.source_theta[k]);
            let e0 = (self.image.y[k] - self.source_y[k]).abs();
            let lhs1 = self.image.dy[k] * j.d1;
            let e1 = (lhs1 - self.source_dy[k]).abs() / self.source_dy[k].abs().max(1.0);
            let lhs2 = self.image.d2y[k] * j.d1 * j.d1 + self.image.dy[k] * j.d2;
            let e2 = (lhs2 - self.source_d2y[k]).abs() / self.source_d2y[k].abs().max(1.0);
            worst = worst.max(e0).max(e1).max(e2);
        }
        worst
    }
}

/// Source-parametrized first and second derivatives of `θ ↦ f(θ, Y(θ))`.
#[inline]
fn source_derivatives(sys: &SkewSystem, t: f64, y: f64, dy: f64, d2y: f64) -> (f64, f64, f64) {
    let p = sys.fiber().partials(t, y);
    let n1 = p.ft + p.fx * dy;
    let n2 = p.ftt + 2.0 * p.ftx * dy + p.fxx * dy * dy + p.fx * d2y;
    (p.f, n1, n2)
}

/// Push the part of `c` over `ω_branch` forward by one step.
pub fn push_curve(sys: &SkewSystem, c: &AdmissibleCurve, branch: usize) -> Result<PushedCurve> {
    let base = sys.base();
    if branch >= base.branch_count() {
        return precondition(format!("branch {branch} is not retained"));
    }
    let (lo, hi) = base.partition().interval(branch);
    let start = c.theta.partition_point(|&t| t <= lo);
    let end = c.theta.partition_point(|&t| t <= hi);
    let n = end - start;
    let mut out = PushedCurve {
        branch,
        image: AdmissibleCurve {
            theta: Vec::with_capacity(n),
            y: Vec::with_capacity(n),
            dy: Vec::with_capacity(n),
            d2y: Vec::with_capacity(n),
            alpha: c.alpha,
            spec: None,
        },
        source_theta: Vec::with_capacity(n),
        source_y: Vec::with_capacity(n),
        source_dy: Vec::with_capacity(n),
        source_d2y: Vec::with_capacity(n),
    };
    for k in start..end {
        let t = c.theta[k];
        let j = base.branch_jet(branch, t);
        let (f, n1, n2) = source_derivatives(sys, t, c.y[k], c.dy[k], c.d2y[k]);
        let y1 = n1 / j.d1;
        let y2 = (n2 - y1 * j.d2) / (j.d1 * j.d1);
        out.image.theta.push(j.v);
        out.image.y.push(f);
        out.image.dy.push(y1);
        out.image.d2y.push(y2);
        out.source_theta.push(t);
        out.source_y.push(f);
        out.source_dy.push(n1);
        out.source_d2y.push(n2);
    }
    Ok(out)
}

/// Image curves along every word of length `depth`, produced one at a time.
pub fn push_cylinders<'a>(
    sys: &'a SkewSystem,
    c: &'a AdmissibleCurve,
    depth: usize,
) -> impl Iterator<Item = Result<(Itinerary, AdmissibleCurve)>> + 'a {
    let b = sys.base().branch_count();
    let total = (b as u128).checked_pow(depth as u32).unwrap_or(u128::MAX);
    (0..total).map(move |mut code| {
        let mut word = vec![0usize; depth];
        for s in word.iter_mut().rev() {
            *s = (code % b as u128) as usize;
            code /= b as u128;
        }
        let it = Itinerary(word);
        let curve = push_along(sys, c, &it)?;
        Ok((it, curve))
    })
}

/// The image curve of `c` along the word `it`.
pub fn push_along(sys: &SkewSystem, c: &AdmissibleCurve, it: &Itinerary) -> Result<AdmissibleCurve> {
    let mut cur = c.clone();
    for &s in &it.0 {
        let p = push_curve(sys, &cur, s)?;
        cur = p.image;
    }
    Ok(cur)
}

/// Worst margin of the dichotomy `|Ỹ₁'| ≥ α/2` or `|Ỹ₁''| ≥ 4α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transversality {
    /// `min_k max(|Ỹ₁'| - α/2, |Ỹ₁''| - 4α)`.
    pub margin: f64,
    pub violations: usize,
    pub nodes: usize,
}

pub fn transversality_check(sys: &SkewSystem, c: &AdmissibleCurve) -> Result<Transversality> {
    if !sys.fiber().is_sine_family() {
        return precondition("the dichotomy constants hold for the plain sine fiber family only");
    }
    let a = c.alpha;
    let mut out = Transversality { margin: f64::INFINITY, violations: 0, nodes: c.len() };
    for k in 0..c.len() {
        let (_, n1, n2) = source_derivatives(sys, c.theta[k], c.y[k], c.dy[k], c.d2y[k]);
        let m = (n1.abs() - 0.5 * a).max(n2.abs() - 4.0 * a);
        if m < 0.0 {
            out.violations += 1;
        }
        out.margin = out.margin.min(m);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Streams;
    use crate::skew::FiberMap;

    fn sys(alpha: f64) -> SkewSystem {
        SkewSystem::new(BaseMap::uniform_linear(16).unwrap(), FiberMap::viana(1.8392867552141612, alpha))
            .unwrap()
    }

    #[test]
    fn zero_curve_push() {
        let s = sys(1e-3);
        let c = AdmissibleCurve::constant(0.0, 16_000, 1e-3);
        let p = push_curve(&s, &c, 0).unwrap();
        for k in 0..p.source_theta.len() {
            let t = p.source_theta[k];
            let expect = 2.0 * PI * 1e-3 * (2.0 * PI * t).cos() / 16.0;
            assert!((p.image.dy[k] - expect).abs() < 1e-17);
        }
        let (r1, _) = p.derivative_ratios();
        assert!(r1 <= 2.0 * PI / 16.0 + 1e-12);
    }

    #[test]
    fn constant_curve_push() {
        let s = sys(1e-3);
        let c = AdmissibleCurve::constant(0.7, 16_000, 1e-3);
        let p = push_curve(&s, &c, 5).unwrap();
        for k in 0..p.source_theta.len() {
            let t = p.source_theta[k];
            assert_eq!(p.image.dy[k], 2.0 * PI * 1e-3 * (2.0 * PI * t).cos() / 16.0);
        }
    }

    #[test]
    fn random_curves_are_admissible_and_preserved() {
        let s = sys(1e-3);
        let st = Streams::new(5);
        for i in 0..10 {
            let c = AdmissibleCurve::random(&mut st.rng(i), 20_000, 1e-3, s.trap());
            assert!(c.is_admissible(s.trap(), 0.0));
            for b in 0..16 {
                let p = push_curve(&s, &c, b).unwrap();
                let (r1, r2) = p.derivative_ratios();
                assert!(r1 <= (2.0 * PI + 4.0) / 16.0 && r2 <= 1.0);
                assert!(p.image.is_admissible(s.trap(), 1e-12));
                assert!(p.consistency_defect(s.base()) < 1e-12);
            }
        }
    }

    #[test]
    fn transversality_at_known_points() {
        let s = sys(1e-3);
        let c = AdmissibleCurve::constant(0.0, 4, 1e-3);
        let t = transversality_check(&s, &c).unwrap();
        assert_eq!(t.violations, 0);
        let c = AdmissibleCurve::sample(CurveSpec::Constant(0.0), 1, 1e-3);
        let (_, n1, n2) = source_derivatives(&s, 0.25, 0.0, 0.0, 0.0);
        assert!(n1.abs() < 1e-15 && (n2.abs() - 4.0 * PI * PI * 1e-3).abs() < 1e-15);
        let (_, n1, _) = source_derivatives(&s, 0.0, 0.0, 0.0, 0.0);
        assert!((n1 - 2.0 * PI * 1e-3).abs() < 1e-15);
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn transversality_requires_sine_family() {
        let s = SkewSystem::new(
            BaseMap::uniform_linear(16).unwrap(),
            FiberMap::viana(1.83, 1e-3).with_shift(1e-4),
        )
        .unwrap();
        let c = AdmissibleCurve::constant(0.0, 10, 1e-3);
        assert!(transversality_check(&s, &c).is_err());
    }

    #[test]
    fn lazy_cylinder_pushes() {
        let s = sys(1e-3);
        let c = AdmissibleCurve::constant(0.3, 16 * 16 * 8, 1e-3);
        let mut n = 0;
        for r in push_cylinders(&s, &c, 2).take(20) {
            let (it, img) = r.unwrap();
            assert_eq!(it.len(), 2);
            assert_eq!(img.len(), 8);
            assert!(img.is_admissible(s.trap(), 1e-12));
            n += 1;
        }
        assert_eq!(n, 20);
    }
}
