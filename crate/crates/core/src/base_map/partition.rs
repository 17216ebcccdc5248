use crate::error::{precondition, Result};

/// A finite truncation of an at most countable partition of (0,1] into
/// left-open right-closed intervals `(b[i], b[i+1]]`.
///
/// Whatever lies to the right of the last retained breakpoint is residual
/// mass that the truncation does not model.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovPartition {
    breakpoints: Vec<f64>,
}

impl MarkovPartition {
    /// `count` intervals of equal width `1/count`.
    pub fn uniform(count: usize) -> Result<Self> {
        if count == 0 {
            return precondition("a partition needs at least one interval");
        }
        let mut b: Vec<f64> = (0..=count).map(|i| i as f64 / count as f64).collect();
        b[count] = 1.0;
        Ok(Self { breakpoints: b })
    }

    pub fn from_breakpoints(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return precondition("need at least two breakpoints");
        }
        if breakpoints[0] != 0.0 {
            return precondition("first breakpoint must be 0");
        }
        if *breakpoints.last().unwrap() > 1.0 {
            return precondition("breakpoints must lie in [0,1]");
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return precondition("breakpoints must be strictly increasing");
        }
        Ok(Self { breakpoints })
    }

    /// `{(0,1/2], (1/2,3/4], ...}` truncated after `count` intervals.
    pub fn dyadic_accumulating(count: usize) -> Result<Self> {
        Self::geometric(0.5, count)
    }

    /// Intervals of widths `(1-r) r^i`, accumulating at 1, truncated after
    /// `count` intervals.
    pub fn geometric(ratio: f64, count: usize) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) || count == 0 {
            return precondition("geometric partition needs 0 < ratio < 1 and count > 0");
        }
        let mut b = Vec::with_capacity(count + 1);
        b.push(0.0);
        let mut tail = 1.0;
        for _ in 0..count {
            tail *= ratio;
            b.push(1.0 - tail);
        }
        Self::from_breakpoints(b)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Number of retained intervals.
    pub fn len(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Left and right endpoints of interval `i`.
    pub fn interval(&self, i: usize) -> (f64, f64) {
        (self.breakpoints[i], self.breakpoints[i + 1])
    }

    pub fn width(&self, i: usize) -> f64 {
        self.breakpoints[i + 1] - self.breakpoints[i]
    }

    pub fn max_width(&self) -> f64 {
        (0..self.len()).map(|i| self.width(i)).fold(0.0, f64::max)
    }

    /// Right end of the retained region.
    pub fn retained_end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Lebesgue mass not covered by the retained intervals.
    pub fn residual_mass(&self) -> f64 {
        1.0 - self.retained_end()
    }

    /// The unique `i` with `θ ∈ (b[i], b[i+1]]`, or `None` outside the
    /// retained region.
    pub fn branch_index(&self, theta: f64) -> Option<usize> {
        if !(theta > 0.0) || theta > self.retained_end() {
            return None;
        }
        let k = self.breakpoints.partition_point(|&b| b < theta);
        Some(k - 1)
    }
}
