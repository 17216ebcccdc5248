use std::f64::consts::PI;

use crate::base_map::Jet;

/// `b χ((θ - center)/width)` with `χ(t) = (1 - t²)^4` on `|t| < 1`.
///
/// `χ` vanishes to fourth order at `|t| = 1`, so the bump is C³ on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberBump {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

impl FiberBump {
    pub fn jet(&self, theta: f64) -> Jet {
        let t = (theta - self.center) / self.width;
        if t.abs() >= 1.0 {
            return Jet { v: 0.0, d1: 0.0, d2: 0.0, d3: 0.0 };
        }
        let s = 1.0 - t * t;
        let (s2, s3) = (s * s, s * s * s);
        let iw = 1.0 / self.width;
        let b = self.amplitude;
        Jet {
            v: b * s2 * s2,
            d1: b * (-8.0 * t * s3) * iw,
            d2: b * (-8.0 * s3 + 48.0 * t * t * s2) * iw * iw,
            d3: b * (144.0 * t * s2 - 192.0 * t * t * t * s) * iw * iw * iw,
        }
    }

    /// Closed-form `max_k sup |∂^k bump|`, `k ≤ 3`, from the sup norms of
    /// the derivatives of `χ`.
    pub fn c3_size(&self) -> f64 {
        let w = self.width;
        let norms = [1.0, CHI_SUP[1] / w, CHI_SUP[2] / (w * w), CHI_SUP[3] / (w * w * w)];
        self.amplitude.abs() * norms.iter().cloned().fold(0.0, f64::max)
    }
}

/// Sup norms of `χ, χ', χ'', χ'''` on [-1, 1].
const CHI_SUP: [f64; 4] = [1.0, 1.904_147_549_154_357_6, 8.0, 31.620_710_374_878_687];

/// Derivatives of `f(θ,x)` used by the curve recursions and the cocycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberPartials {
    pub f: f64,
    pub ft: f64,
    pub fx: f64,
    pub ftt: f64,
    pub ftx: f64,
    pub fxx: f64,
}

/// `f(θ,x) = a0 + α sin(2πθ) + bump(θ) + shift - x²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberMap {
    pub a0: f64,
    pub alpha: f64,
    pub bump: Option<FiberBump>,
    pub shift: f64,
}

impl FiberMap {
    pub fn viana(a0: f64, alpha: f64) -> Self {
        Self { a0, alpha, bump: None, shift: 0.0 }
    }

    pub fn with_bump(mut self, bump: FiberBump) -> Self {
        self.bump = Some(bump);
        self
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    /// True for the plain sine family with no bump or shift.
    pub fn is_sine_family(&self) -> bool {
        self.bump.is_none() && self.shift == 0.0
    }

    /// `c(θ) = f(θ, 0)` and its θ-derivatives.
    pub fn parameter_jet(&self, theta: f64) -> Jet {
        let w = 2.0 * PI;
        let (s, c) = (w * theta).sin_cos();
        let a = self.alpha;
        let mut j = Jet {
            v: self.a0 + self.shift + a * s,
            d1: a * w * c,
            d2: -a * w * w * s,
            d3: -a * w * w * w * c,
        };
        if let Some(b) = &self.bump {
            let p = b.jet(theta);
            j.v += p.v;
            j.d1 += p.d1;
            j.d2 += p.d2;
            j.d3 += p.d3;
        }
        j
    }

    /// `c(θ)` alone.
    #[inline]
    pub fn parameter(&self, theta: f64) -> f64 {
        let mut v = self.a0 + self.shift + self.alpha * (2.0 * PI * theta).sin();
        if let Some(b) = &self.bump {
            if (theta - b.center).abs() < b.width {
                v += b.jet(theta).v;
            }
        }
        v
    }

    #[inline]
    pub fn eval(&self, theta: f64, x: f64) -> f64 {
        self.parameter(theta) - x * x
    }

    pub fn partials(&self, theta: f64, x: f64) -> FiberPartials {
        let c = self.parameter_jet(theta);
        FiberPartials { f: c.v - x * x, ft: c.d1, fx: -2.0 * x, ftt: c.d2, ftx: 0.0, fxx: -2.0 }
    }

    /// Points where `c` may attain its extremes, besides a uniform grid.
    pub(crate) fn critical_parameters(&self) -> Vec<f64> {
        let mut v = vec![0.25, 0.75, 1.0];
        if let Some(b) = &self.bump {
            v.push(b.center);
            v.push(b.center - 0.5 * b.width);
            v.push(b.center + 0.5 * b.width);
        }
        v.retain(|t| *t > 0.0 && *t <= 1.0);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let b = FiberBump { center: 0.5, width: 0.1, amplitude: 0.3 };
        let h = 1e-6;
        for &t in &[0.43, 0.47, 0.5, 0.52, 0.58] {
            let j = b.jet(t);
            let (p, m) = (b.jet(t + h), b.jet(t - h));
            assert!(((p.v - m.v) / (2.0 * h) - j.d1).abs() < 1e-5 * j.d1.abs().max(1.0));
            assert!(((p.d1 - m.d1) / (2.0 * h) - j.d2).abs() < 1e-4 * j.d2.abs().max(1.0));
            assert!(((p.d2 - m.d2) / (2.0 * h) - j.d3).abs() < 1e-3 * j.d3.abs().max(1.0));
        }
        assert_eq!(b.jet(0.61).v, 0.0);
    }

    #[test]
    fn chi_sup_norms() {
        let b = FiberBump { center: 0.0, width: 1.0, amplitude: 1.0 };
        let mut sup = [0.0f64; 4];
        for k in 0..=200_000 {
            let j = b.jet(-1.0 + 2.0 * k as f64 / 200_000.0);
            for (s, v) in sup.iter_mut().zip([j.v, j.d1, j.d2, j.d3]) {
                *s = s.max(v.abs());
            }
        }
        for (s, c) in sup.iter().zip(CHI_SUP) {
            assert!((s - c).abs() < 1e-6 * c, "{s} vs {c}");
        }
    }

    #[test]
    fn sine_family_partials() {
        let f = FiberMap::viana(1.8, 0.01);
        let p = f.partials(0.0, 0.5);
        assert!((p.ft - 2.0 * PI * 0.01).abs() < 1e-15);
        assert_eq!(p.fx, -1.0);
        let p = f.partials(0.25, 0.0);
        assert!((p.ftt + 4.0 * PI * PI * 0.01).abs() < 1e-14);
        assert!((f.eval(0.25, 1.0) - 0.81).abs() < 1e-14);
    }
}
