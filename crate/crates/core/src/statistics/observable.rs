use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Revision of the observable family; bump when a member changes meaning.
pub const OBSERVABLE_FAMILY_VERSION: u32 = 1;

/// Hölder observables on `(0,1] × ℝ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    Theta,
    X,
    Constant(f64),
    /// Tent `max(0, 1 - |x - center|/width)` in the fiber coordinate.
    Bump { center: f64, width: f64 },
}

impl Observable {
    #[inline]
    pub fn eval(&self, theta: f64, x: f64) -> f64 {
        match *self {
            Observable::Theta => theta,
            Observable::X => x,
            Observable::Constant(c) => c,
            Observable::Bump { center, width } => (1.0 - (x - center).abs() / width).max(0.0),
        }
    }

    /// `sup |h|` over `(0,1] × [lo, hi]`.
    pub fn sup_norm(&self, lo: f64, hi: f64) -> f64 {
        match *self {
            Observable::Theta => 1.0,
            Observable::X => lo.abs().max(hi.abs()),
            Observable::Constant(c) => c.abs(),
            Observable::Bump { .. } => 1.0,
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Theta => write!(f, "theta"),
            Observable::X => write!(f, "x"),
            Observable::Constant(c) => write!(f, "constant:{c}"),
            Observable::Bump { center, width } => write!(f, "bump:{center}:{width}"),
        }
    }
}

impl FromStr for Observable {
    type Err = Error;

    /// `theta`, `x`, `constant:C` or `bump:CENTER:WIDTH`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |p: &str| -> Result<f64, Error> {
            p.parse::<f64>().map_err(|_| Error::Config(format!("bad number {p:?} in observable {s:?}")))
        };
        match parts.as_slice() {
            ["theta"] => Ok(Observable::Theta),
            ["x"] => Ok(Observable::X),
            ["constant", c] => Ok(Observable::Constant(num(c)?)),
            ["bump", c, w] => {
                let width = num(w)?;
                if !(width > 0.0) {
                    return Err(Error::Config("bump width must be positive".into()));
                }
                Ok(Observable::Bump { center: num(c)?, width })
            }
            _ => Err(Error::Config(format!("unknown observable {s:?}"))),
        }
    }
}

impl Serialize for Observable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Observable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for o in [Observable::Theta, Observable::X, Observable::Constant(0.5), Observable::Bump { center: 0.1, width: 0.2 }] {
            assert_eq!(o.to_string().parse::<Observable>().unwrap(), o);
        }
        assert!("bump:0:0".parse::<Observable>().is_err());
        assert!("y".parse::<Observable>().is_err());
    }

    #[test]
    fn bump_is_tent() {
        let b = Observable::Bump { center: 1.0, width: 0.5 };
        assert_eq!(b.eval(0.3, 1.0), 1.0);
        assert_eq!(b.eval(0.3, 1.25), 0.5);
        assert_eq!(b.eval(0.3, 2.0), 0.0);
    }
}
