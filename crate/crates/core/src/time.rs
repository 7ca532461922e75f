//! Time conventions.
//!
//! Internally every time value is measured in interval units: one unit is one
//! load-tracking interval `I`. Interval `n` covers the half-open range
//! `[n, n + 1)`, so the interval index of a time is its floor.

/// Absolute tolerance used for every time comparison, in interval units.
pub const TIME_EPS: f64 = 1e-9;

/// Interval index containing `t`.
///
/// Values a hair below an integer boundary (float noise from summing
/// traversal times) are snapped up so that occupancy spans and the arrival
/// function agree on which interval a time belongs to.
#[inline]
pub fn interval_of(t: f64) -> u32 {
    let snapped = (t + TIME_EPS).floor();
    if snapped <= 0.0 {
        0
    } else {
        snapped as u32
    }
}

/// Offset of `t` inside its interval, clamped to `[0, 1)`.
#[inline]
pub(crate) fn offset_in(t: f64, interval: u32) -> f64 {
    (t - interval as f64).clamp(0.0, 1.0)
}
