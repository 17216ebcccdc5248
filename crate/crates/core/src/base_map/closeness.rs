use super::{BaseMap, Jet};
use crate::error::{Error, Result};
use crate::skew::SkewSystem;

/// Branchwise C³ distance between renormalized maps, split by component.
///
/// The C³ size of a function is `max_{k ≤ 3} sup |∂^k|`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct C3Distance {
    pub base: f64,
    pub fiber: f64,
}

impl C3Distance {
    pub fn total(&self) -> f64 {
        self.base.max(self.fiber)
    }
}

fn jet_gap(a: Jet, b: Jet, scale: f64) -> f64 {
    let s2 = scale * scale;
    [
        (a.v - b.v).abs(),
        (a.d1 - b.d1 * scale).abs(),
        (a.d2 - b.d2 * s2).abs(),
        (a.d3 - b.d3 * s2 * scale).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

fn check_shapes(reference: &BaseMap, candidate: &BaseMap) -> Result<()> {
    if reference.branch_count() != candidate.branch_count() {
        return Err(Error::Structural(format!(
            "branch counts differ: {} vs {}",
            reference.branch_count(),
            candidate.branch_count()
        )));
    }
    Ok(())
}

/// Visits `grid` nodes of every branch as `(i, θ, θ̃, |ω̃_i|/|ω_i|)`, where
/// `θ̃` is the affine image of `θ ∈ ω_i` in the candidate's `ω̃_i`.
fn renormalized_nodes<'a>(
    reference: &'a BaseMap,
    candidate: &'a BaseMap,
    grid: usize,
) -> impl Iterator<Item = (usize, f64, f64, f64)> + 'a {
    let g = grid.max(2);
    (0..reference.branch_count()).flat_map(move |i| {
        let (b, e) = reference.partition().interval(i);
        let (bt, et) = candidate.partition().interval(i);
        let rho = (et - bt) / (e - b);
        (0..g).map(move |k| {
            let u = k as f64 / (g - 1) as f64;
            (i, b + (e - b) * u, bt + (et - bt) * u, rho)
        })
    })
}

/// C³ distance between two bases after renormalizing each candidate branch
/// onto the matching reference branch.
pub fn base_c3_distance(reference: &BaseMap, candidate: &BaseMap, grid: usize) -> Result<f64> {
    check_shapes(reference, candidate)?;
    Ok(renormalized_nodes(reference, candidate, grid)
        .map(|(i, t, tt, rho)| jet_gap(reference.branch_jet(i, t), candidate.branch_jet(i, tt), rho))
        .fold(0.0, f64::max))
}

/// Operational ε of ε-C³-closeness between two skew systems.
///
/// Both fibers have the form `c(θ) - x²`, so every `x`-derivative of the
/// difference vanishes identically and the fiber part reduces to the
/// renormalized θ-jets of `c`.
pub fn c3_distance(reference: &SkewSystem, candidate: &SkewSystem, grid: usize) -> Result<C3Distance> {
    let (rb, cb) = (reference.base(), candidate.base());
    check_shapes(rb, cb)?;
    let mut fiber = 0.0f64;
    for (_, t, tt, rho) in renormalized_nodes(rb, cb, grid) {
        let a = reference.fiber().parameter_jet(t);
        let b = candidate.fiber().parameter_jet(tt);
        fiber = fiber.max(jet_gap(a, b, rho));
    }
    Ok(C3Distance { base: base_c3_distance(rb, cb, grid)?, fiber })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skew::{FiberBump, FiberMap};

    fn system(fiber: FiberMap) -> SkewSystem {
        SkewSystem::new(BaseMap::uniform_linear(16).unwrap(), fiber).unwrap()
    }

    #[test]
    fn identity_and_shift() {
        let r = system(FiberMap::viana(1.83, 0.01));
        assert_eq!(c3_distance(&r, &r, 1000).unwrap().total(), 0.0);
        let c = system(FiberMap::viana(1.83, 0.01).with_shift(1e-4));
        let d = c3_distance(&r, &c, 1000).unwrap();
        assert!((d.total() - 1e-4).abs() < 1e-12);
    }

    #[test]
    fn bump_scales_like_inverse_cube_width() {
        let r = system(FiberMap::viana(1.83, 0.01));
        let b = 1e-5;
        let mut prev: Option<f64> = None;
        for w in [0.02, 0.01, 0.005] {
            let bump = FiberBump { center: 8.0 / 15.0, width: w, amplitude: b };
            let c = system(FiberMap::viana(1.83, 0.01).with_bump(bump));
            let d = c3_distance(&r, &c, 4000).unwrap().total();
            assert!((d - bump.c3_size()).abs() < 0.01 * d, "{d} vs {}", bump.c3_size());
            if let Some(p) = prev {
                assert!((d / p - 8.0).abs() < 0.1);
            }
            prev = Some(d);
        }
    }

    #[test]
    fn branch_mismatch() {
        let a = BaseMap::uniform_linear(16).unwrap();
        let b = BaseMap::uniform_linear(17).unwrap();
        assert!(matches!(base_c3_distance(&a, &b, 1000), Err(Error::Structural(_))));
    }

    #[test]
    fn sine_bump_base_distance() {
        let a = BaseMap::uniform_linear(16).unwrap();
        let amp = 1e-3 / (16.0 * std::f64::consts::PI).powi(3);
        let b = BaseMap::perturbed_linear(16, amp, 8.0).unwrap();
        let d = base_c3_distance(&a, &b, 1000).unwrap();
        assert!((d - 1e-3).abs() < 1e-9, "{d}");
    }
}
