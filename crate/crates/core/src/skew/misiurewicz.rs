use crate::error::{precondition, Error, Result};

/// Admissible combinatorics for the Misiurewicz parameter search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combinatorics {
    /// `h³(0)` lands on the repelling 2-cycle of `h(x) = a - x²`.
    CritToPeriod2,
}

impl std::str::FromStr for Combinatorics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "crit_to_period2" => Ok(Self::CritToPeriod2),
            other => Err(Error::Config(format!("unknown combinatorics `{other}`"))),
        }
    }
}

/// Search bracket for [`Combinatorics::CritToPeriod2`].
pub const CRIT_TO_PERIOD2_BRACKET: (f64, f64) = (1.80, 1.85);

/// Point of the 2-cycle `{(-1 ± √(4a-3))/2}` of `a - x²` hit by the
/// critical orbit.
pub fn period2_point(a: f64) -> f64 {
    (1.0 - (4.0 * a - 3.0).sqrt()) / 2.0
}

/// Multiplier `4(1 - a)` of the 2-cycle.
pub fn period2_multiplier(a: f64) -> f64 {
    4.0 * (1.0 - a)
}

fn crit_to_period2_defect(a: f64) -> f64 {
    let c2 = a - a * a;
    a - c2 * c2 - period2_point(a)
}

/// Bisection for the parameter with the requested combinatorics, followed
/// by a repelling-multiplier check.
pub fn find_misiurewicz(comb: Combinatorics, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol <= 1e-10) {
        return precondition("tolerance must lie in (0, 1e-10]");
    }
    let Combinatorics::CritToPeriod2 = comb;
    let (mut lo, mut hi) = CRIT_TO_PERIOD2_BRACKET;
    let (flo, fhi) = (crit_to_period2_defect(lo), crit_to_period2_defect(hi));
    if flo.signum() == fhi.signum() {
        return Err(Error::NoRoot { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = crit_to_period2_defect(mid);
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    if period2_multiplier(a).abs() <= 1.0 {
        return Err(Error::NonHyperbolic(format!("2-cycle at a = {a} is not repelling")));
    }
    Ok(a)
}

/// Evidence that the critical point of `a - x²` is strictly pre-periodic
/// onto a repelling cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MisiurewiczCertificate {
    pub preperiod: usize,
    pub period: usize,
    pub multiplier: f64,
}

/// Search the critical orbit for the first near-coincidence
/// `|h^{k+p}(0) - h^k(0)| < tol` with `k ≤ max_preperiod`, `p ≤ max_period`.
pub fn certify_misiurewicz(
    a: f64,
    max_preperiod: usize,
    max_period: usize,
    tol: f64,
) -> Result<MisiurewiczCertificate> {
    let mut orbit = vec![0.0f64];
    for _ in 0..(max_preperiod + max_period) {
        let x = *orbit.last().unwrap();
        orbit.push(a - x * x);
    }
    for k in 0..=max_preperiod {
        for p in 1..=max_period {
            if (orbit[k + p] - orbit[k]).abs() < tol {
                if k == 0 {
                    return Err(Error::NonHyperbolic(format!(
                        "critical point of a = {a} is periodic (period {p}), not pre-periodic"
                    )));
                }
                let multiplier = orbit[k..k + p].iter().map(|x| -2.0 * x).product::<f64>();
                if multiplier.abs() <= 1.0 {
                    return Err(Error::NonHyperbolic(format!(
                        "cycle reached by the critical orbit has multiplier {multiplier}"
                    )));
                }
                return Ok(MisiurewiczCertificate { preperiod: k, period: p, multiplier });
            }
        }
    }
    Err(Error::NonHyperbolic(format!("no pre-periodic coincidence found for a = {a}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The real root of `x³ - x² - x - 1`, which solves the same equation.
    fn tribonacci() -> f64 {
        let r = 33f64.sqrt();
        (1.0 + (19.0 + 3.0 * r).cbrt() + (19.0 - 3.0 * r).cbrt()) / 3.0
    }

    #[test]
    fn root_matches_closed_form() {
        let a = find_misiurewicz(Combinatorics::CritToPeriod2, 1e-12).unwrap();
        assert!((a - tribonacci()).abs() < 1e-11, "{a}");
        assert!(a > 1.80 && a < 1.85);
        assert!(crit_to_period2_defect(1.80) > 0.0 && crit_to_period2_defect(1.85) < 0.0);
        let m = period2_multiplier(a);
        assert!((m + 3.3571).abs() < 1e-3 && m.abs() > 1.0);
    }

    #[test]
    fn certificate() {
        let a = find_misiurewicz(Combinatorics::CritToPeriod2, 1e-12).unwrap();
        let c = certify_misiurewicz(a, 8, 4, 1e-6).unwrap();
        assert_eq!((c.preperiod, c.period), (3, 2));
        assert!((c.multiplier - period2_multiplier(a)).abs() < 1e-5);
    }

    #[test]
    fn periodic_critical_point_is_rejected() {
        assert!(matches!(certify_misiurewicz(1.0, 8, 4, 1e-9), Err(Error::NonHyperbolic(_))));
    }

    #[test]
    fn bad_tolerance() {
        assert!(find_misiurewicz(Combinatorics::CritToPeriod2, 1e-3).is_err());
        assert!("crit_to_fixed".parse::<Combinatorics>().is_err());
    }
}
