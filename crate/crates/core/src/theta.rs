//! Momentum coefficient schedule shared by FISTA and APG.
//!
//! `θ_0 = 1` and `θ_{k+1}` is the positive root of `X² + θ_k² X − θ_k² = 0`,
//! equivalently `(1 − θ_{k+1}) / θ_{k+1}² = 1 / θ_k²`.

use crate::error::{Error, Result};

/// Next momentum coefficient.
///
/// Evaluated as `2θ / (θ + √(θ² + 4))`, which is the textbook root
/// `(√(θ⁴ + 4θ²) − θ²) / 2` rewritten without the cancelling subtraction.
pub fn theta_next(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::domain(format!(
            "theta must lie in (0, 1], got {theta}"
        )));
    }
    Ok(next_unchecked(theta))
}

#[inline]
pub(crate) fn next_unchecked(theta: f64) -> f64 {
    2.0 * theta / (theta + (theta * theta + 4.0).sqrt())
}

/// `θ_0, …, θ_{len−1}`.
pub fn theta_sequence(len: usize) -> Result<Vec<f64>> {
    if len == 0 {
        return Err(Error::domain("theta_sequence needs at least one term"));
    }
    Ok(ThetaState::new().take(len).collect())
}

/// `θ_k` for a single index, computed incrementally.
pub fn theta_at(k: usize) -> f64 {
    let mut th = 1.0;
    for _ in 0..k {
        th = next_unchecked(th);
    }
    th
}

/// Position in the momentum schedule.
///
/// Iterating yields `θ_k, θ_{k+1}, …` starting from the current state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaState {
    pub k: usize,
    pub theta: f64,
}

impl ThetaState {
    pub fn new() -> Self {
        ThetaState { k: 0, theta: 1.0 }
    }

    pub fn advance(&mut self) {
        self.theta = next_unchecked(self.theta);
        self.k += 1;
    }
}

impl Default for ThetaState {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for ThetaState {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let cur = self.theta;
        self.advance();
        Some(cur)
    }
}
