use crate::network::{EdgeAttrs, EdgeId};
use crate::time::{interval_of, offset_in};

use super::{LoadError, LoadView};

/// Load-dependent exponent applied to the intra-interval offset.
///
/// `1` while `load ≤ capacity`, otherwise `1 / (load − capacity)` clamped to
/// at most `1`. Without the clamp a fractional overload (`0 < l − F < 1`)
/// would make the edge faster than free flow.
#[inline]
pub fn delay_exponent(load: f64, capacity: f64) -> f64 {
    if load <= capacity {
        1.0
    } else {
        (1.0 / (load - capacity)).min(1.0)
    }
}

/// Exit time for a vehicle entering at `entry` when the entry interval holds `load`.
///
/// `exit = τ + (entry − τ)^ε + Υ` with `τ = ⌊entry⌋`. The delay term stays in
/// `[0, 1)`, so a later entry can never exit earlier.
#[inline]
pub fn traverse(entry: f64, load: f64, attrs: &EdgeAttrs) -> f64 {
    let interval = interval_of(entry);
    let offset = offset_in(entry, interval);
    let eps = delay_exponent(load, attrs.free_flow_capacity);
    let delay = if eps == 1.0 { offset } else { offset.powf(eps) };
    interval as f64 + delay + attrs.min_travel_time
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalQuery {
    pub edge: EdgeId,
    /// Arrival at the edge's tail node, interval units.
    pub arrival_at_tail: f64,
    /// Count the querying vehicle in the load.
    pub include_self: bool,
}

impl ArrivalQuery {
    pub fn new(edge: EdgeId, arrival_at_tail: f64) -> Self {
        Self {
            edge,
            arrival_at_tail,
            include_self: false,
        }
    }
}

/// Arrival at the head of `q.edge`, reading the load of the entry interval from `view`.
pub fn arrival_time<V: LoadView + ?Sized>(
    view: &V,
    q: &ArrivalQuery,
    attrs: &EdgeAttrs,
) -> Result<f64, LoadError> {
    if q.arrival_at_tail < 0.0 {
        return Err(LoadError::NegativeTime(q.arrival_at_tail));
    }
    let horizon = view.horizon();
    let entry_interval = interval_of(q.arrival_at_tail);
    if entry_interval >= horizon {
        return Err(LoadError::HorizonOverflow {
            edge: q.edge,
            interval: entry_interval,
            horizon,
        });
    }
    let load = view.load(q.edge, entry_interval) + u32::from(q.include_self);
    let exit = traverse(q.arrival_at_tail, f64::from(load), attrs);
    let exit_interval = interval_of(exit);
    if exit_interval >= horizon {
        return Err(LoadError::HorizonOverflow {
            edge: q.edge,
            interval: exit_interval,
            horizon,
        });
    }
    Ok(exit)
}
