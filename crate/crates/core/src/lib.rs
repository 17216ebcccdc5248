//! Numerical laboratory for quadratic skew products over Markov expanding
//! interval maps.
//!
//! The crate builds the maps (`base_map`, `skew`), pushes admissible curves
//! through them (`curves`), measures critical recurrence (`recurrence`),
//! estimates ergodic statistics by Monte Carlo (`statistics`) and certifies
//! fibered attractors (`fibered`). Every Monte Carlo estimate is keyed by a
//! seed and is bit-identical for any worker count.

pub mod base_map;
pub mod config;
pub mod curves;
pub mod error;
pub mod fibered;
pub mod numerics;
pub mod recurrence;
pub mod report;
pub mod runner;
pub mod sampling;
pub mod skew;
pub mod statistics;
pub mod verify;

pub use error::{Error, Result};
