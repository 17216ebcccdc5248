//! Recurrence to the critical line `x = 0`.
//!
//! Windows `J(r)` shrink by a factor `e` per unit of depth. Orbit entries
//! into `J(0)` are classified by depth, curve images are measured against
//! the windows, and the first-time functions of non-uniform expansion and
//! slow recurrence are sampled.

mod displacement;
mod expansion;
mod first_times;
mod returns;
mod tail;
mod window;

pub use displacement::{displacement_partitions, Displacement, ZETA};
pub use expansion::{first_return_times, n_of_alpha, ExpansionLadder, ReturnTime};
pub use first_times::{
    expansion_time_tails, first_times, log_recurrence_cost, lower_triangular_conorm, FirstTimeParams,
    FirstTimeTails, FirstTimes, TailRow,
};
pub use returns::{
    classify_orbit, classify_returns, heavy_return_tail, heavy_threshold, sampled_fiber_orbit, HeavyTailRow,
    ReturnClassification, ReturnKind, ReturnRecord,
};
pub use tail::{deep_return_containment, deep_return_tail, Containment, DeepReturnTail, DeepTailRow};
pub use window::{critical_window, m_of_alpha, return_depth, window_half_width};
