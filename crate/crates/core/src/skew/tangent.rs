use super::SkewSystem;
use crate::error::{Error, Result};

/// A point, a unit tangent vector at it, and the accumulated `log ‖Dφⁿ v‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentState {
    pub theta: f64,
    pub x: f64,
    pub v: [f64; 2],
    pub log_norm: f64,
}

impl TangentState {
    pub fn new(theta: f64, x: f64, v: [f64; 2]) -> Self {
        let n = v[0].hypot(v[1]);
        Self { theta, x, v: [v[0] / n, v[1] / n], log_norm: 0.0 }
    }

    /// `∂/∂x` at the point.
    pub fn vertical(theta: f64, x: f64) -> Self {
        Self::new(theta, x, [0.0, 1.0])
    }
}

impl SkewSystem {
    /// `Dφ = [[g', 0], [∂θf, ∂xf]]` applied to `v`, renormalized.
    pub fn push_tangent(&self, ts: TangentState) -> Result<TangentState> {
        let gp = self.base().jet(ts.theta)?.d1;
        let p = self.fiber().partials(ts.theta, ts.x);
        let w0 = gp * ts.v[0];
        let w1 = p.ft * ts.v[0] + p.fx * ts.v[1];
        let n = w0.hypot(w1);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Degenerate(format!(
                "tangent vector vanished at ({}, {})",
                ts.theta, ts.x
            )));
        }
        let (theta, x) = self.step(ts.theta, ts.x)?;
        Ok(TangentState { theta, x, v: [w0 / n, w1 / n], log_norm: ts.log_norm + n.ln() })
    }

    /// `log |det Dφ|` at a point.
    pub fn log_jacobian(&self, theta: f64, x: f64) -> Result<f64> {
        let gp = self.base().jet(theta)?.d1;
        Ok(gp.abs().ln() + (2.0 * x).abs().ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_map::BaseMap;
    use crate::skew::FiberMap;

    fn sys(a0: f64, alpha: f64) -> SkewSystem {
        SkewSystem::new(BaseMap::uniform_linear(16).unwrap(), FiberMap::viana(a0, alpha)).unwrap()
    }

    #[test]
    fn vertical_vector_at_one() {
        let s = sys(2.0, 0.0);
        let t = s.push_tangent(TangentState::vertical(0.3, 1.0)).unwrap();
        assert!((t.log_norm - 2f64.ln()).abs() < 1e-15);
        assert_eq!(t.v[0], 0.0);
        assert_eq!(t.v[1].abs(), 1.0);
    }

    #[test]
    fn vertical_stays_vertical() {
        let s = sys(1.83, 0.01);
        let mut t = TangentState::vertical(0.123, 0.4);
        let mut expected = 0.0;
        for _ in 0..200 {
            expected += (2.0 * t.x).abs().ln();
            t = s.push_tangent(t).unwrap();
            assert_eq!(t.v[0], 0.0);
        }
        assert!((t.log_norm - expected).abs() < 1e-9);
    }

    #[test]
    fn horizontal_component_grows_like_base() {
        let s = sys(1.83, 0.01);
        let mut t = TangentState::new(0.123, 0.4, [1.0, 0.0]);
        let mut prev = 0.0;
        for k in 0..12 {
            t = s.push_tangent(t).unwrap();
            if k > 2 {
                assert!(t.log_norm - prev >= 16f64.ln() - 1e-2);
            }
            prev = t.log_norm;
        }
    }

    #[test]
    fn degenerate_on_critical_line() {
        let s = sys(1.83, 0.01);
        assert!(matches!(
            s.push_tangent(TangentState::vertical(0.3, 0.0)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn jacobian_is_additive() {
        let s = sys(1.83, 0.01);
        let j = s.log_jacobian(0.2, 0.7).unwrap();
        assert!((j - (16f64.ln() + 1.4f64.ln())).abs() < 1e-14);
    }
}
