use rand::Rng;

use super::BaseMap;
use crate::error::{precondition, Error, Result};

/// A finite word `(s_0, ..., s_{n-1})` over the retained branch symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Itinerary(pub Vec<usize>);

impl Itinerary {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Uniformly random word of the given depth.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, branches: usize, depth: usize) -> Self {
        Self((0..depth).map(|_| rng.gen_range(0..branches)).collect())
    }

    /// The first `n` symbols visited by the orbit of `θ`.
    pub fn of_point(map: &BaseMap, theta: f64, n: usize) -> Result<Self> {
        let mut t = theta;
        let mut s = Vec::with_capacity(n);
        for _ in 0..n {
            let i = map.branch_index(t).ok_or(Error::Truncation(t))?;
            s.push(i);
            t = map.eval_branch(i, t).clamp(f64::MIN_POSITIVE, 1.0);
        }
        Ok(Self(s))
    }
}

/// The left-open right-closed interval `(lo, lo + len]`.
///
/// The length is carried separately so deep cylinders keep full relative
/// precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder {
    pub lo: f64,
    pub len: f64,
}

impl Cylinder {
    pub fn hi(&self) -> f64 {
        self.lo + self.len
    }

    pub fn contains(&self, theta: f64) -> bool {
        theta > self.lo && theta <= self.hi()
    }

    pub fn midpoint(&self) -> f64 {
        self.lo + 0.5 * self.len
    }

    /// The point at relative position `u ∈ (0,1]`.
    pub fn at(&self, u: f64) -> f64 {
        self.lo + u * self.len
    }
}

impl BaseMap {
    /// `ω_{(s_0,...,s_{n-1})}`, computed by composing inverse branches from
    /// the innermost symbol outward.
    pub fn cylinder(&self, it: &Itinerary) -> Result<Cylinder> {
        let n = self.branch_count();
        if it.is_empty() {
            return precondition("empty itinerary");
        }
        if let Some(&s) = it.0.iter().find(|&&s| s >= n) {
            return precondition(format!("symbol {s} is not a retained branch"));
        }
        let last = *it.0.last().unwrap();
        let (b, _) = self.partition().interval(last);
        let mut cyl = Cylinder { lo: b, len: self.partition().width(last) };
        for &s in it.0.iter().rev().skip(1) {
            let lo = self.inverse_branch(s, cyl.lo);
            let len = if self.is_linear() {
                cyl.len * self.partition().width(s)
            } else {
                self.preimage_length(s, lo, cyl.len)
            };
            if !(len > 0.0 && len.is_finite()) {
                return Err(Error::Inconsistent(format!(
                    "inverse branch {s} collapsed the cylinder (len = {len:e})"
                )));
            }
            cyl = Cylinder { lo, len };
        }
        Ok(cyl)
    }

    /// The `Δ > 0` with `g_i(lo + Δ) - g_i(lo) = len`.
    fn preimage_length(&self, i: usize, lo: f64, len: f64) -> f64 {
        let mut d = len / self.branch_jet(i, lo).d1;
        for _ in 0..50 {
            let r = self.branch_increment(i, lo, d) - len;
            let step = r / self.branch_jet(i, lo + d).d1;
            d -= step;
            if step.abs() <= 1e-17 * d.abs() {
                break;
            }
        }
        d
    }

    /// Sum of `log |g'|` along the orbit of `θ` that follows `it`.
    fn log_derivative_along(&self, it: &Itinerary, theta: f64) -> f64 {
        let mut t = theta;
        let mut acc = 0.0;
        for &s in &it.0 {
            acc += self.branch_derivative(s, t).ln();
            t = self.eval_branch(s, t);
        }
        acc
    }
}

/// `exp(-dK/(d-1)), exp(dK/(d-1))` for the map's measured `d` and `K`.
pub fn gibbs_band(map: &BaseMap) -> (f64, f64) {
    let d = map.expansion();
    let e = d * map.renyi() / (d - 1.0);
    ((-e).exp(), e.exp())
}

/// `Leb(ω) |(g^n)'(θ*)|` for the cylinder `ω` of `it`.
pub fn gibbs_check(map: &BaseMap, it: &Itinerary, theta_star: f64) -> Result<f64> {
    let cyl = map.cylinder(it)?;
    if !cyl.contains(theta_star) {
        return precondition(format!("{theta_star} is not in the cylinder"));
    }
    if map.is_linear() {
        let mut r = cyl.len;
        for &s in &it.0 {
            r *= map.branch_derivative(s, 0.0);
        }
        return Ok(r);
    }
    Ok(cyl.len * map.log_derivative_along(it, theta_star).exp())
}

/// `|(g^n)'(θ_1)| / |(g^n)'(θ_2)|` for two points of the same depth-n cylinder.
pub fn distortion_ratio(map: &BaseMap, it: &Itinerary, theta1: f64, theta2: f64) -> Result<f64> {
    let cyl = map.cylinder(it)?;
    if !cyl.contains(theta1) || !cyl.contains(theta2) {
        return precondition("points are not in the same cylinder");
    }
    if map.is_linear() {
        return Ok(1.0);
    }
    Ok((map.log_derivative_along(it, theta1) - map.log_derivative_along(it, theta2)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Streams;

    #[test]
    fn uniform_cylinders() {
        let g = BaseMap::uniform_linear(16).unwrap();
        let c = g.cylinder(&Itinerary(vec![0, 0])).unwrap();
        assert_eq!((c.lo, c.hi()), (0.0, 1.0 / 256.0));
        let c = g.cylinder(&Itinerary(vec![15])).unwrap();
        assert_eq!((c.lo, c.hi()), (15.0 / 16.0, 1.0));
        assert!(g.cylinder(&Itinerary(vec![16])).is_err());
    }

    #[test]
    fn uniform_gibbs_and_distortion_are_one() {
        let g = BaseMap::uniform_linear(16).unwrap();
        let mut rng = Streams::new(3).rng(0);
        for n in 1..=6 {
            let it = Itinerary::random(&mut rng, 16, n);
            let c = g.cylinder(&it).unwrap();
            assert!((c.len * 16f64.powi(n as i32) - 1.0).abs() < 1e-12);
            assert_eq!(gibbs_check(&g, &it, c.at(0.3)).unwrap(), 1.0);
            assert_eq!(distortion_ratio(&g, &it, c.at(0.2), c.at(0.9)).unwrap(), 1.0);
        }
    }

    #[test]
    fn itinerary_of_cylinder_point() {
        let g = BaseMap::perturbed_linear(16, 4e-3, 8.0).unwrap();
        let it = Itinerary(vec![4, 7, 2, 11]);
        let c = g.cylinder(&it).unwrap();
        assert_eq!(Itinerary::of_point(&g, c.midpoint(), 4).unwrap(), it);
    }

    #[test]
    fn perturbed_cylinder_matches_derivative_within_band() {
        let g = BaseMap::perturbed_linear(16, 5.07e-3, 8.0).unwrap();
        assert!((g.renyi() - 0.05).abs() < 2e-3);
        let (lo, hi) = gibbs_band(&g);
        let it = Itinerary(vec![4, 7, 2]);
        let c = g.cylinder(&it).unwrap();
        let r = gibbs_check(&g, &it, c.midpoint()).unwrap();
        assert!(r >= lo && r <= hi, "{r} not in [{lo}, {hi}]");
    }

    #[test]
    fn outside_point_is_rejected() {
        let g = BaseMap::uniform_linear(16).unwrap();
        let it = Itinerary(vec![1, 2]);
        assert!(gibbs_check(&g, &it, 0.9).is_err());
        assert!(distortion_ratio(&g, &it, 0.9, 0.9).is_err());
    }
}
