use std::cmp::Ordering;

use crate::load::LoadView;
use crate::network::RoadNetwork;
use crate::routing::{Path, Query};
use crate::time::TIME_EPS;

use super::PenaltyPredictor;

/// A query awaiting assignment, with its free-flow route `φ`.
#[derive(Debug, Clone)]
pub struct Pending {
    pub query: Query,
    pub free_flow: Path,
}

impl Pending {
    /// `depart + |φ|`.
    pub fn free_flow_arrival(&self) -> f64 {
        self.free_flow.total_arrival
    }
}

fn by_free_flow_arrival(a: &Pending, b: &Pending) -> Ordering {
    a.free_flow_arrival()
        .total_cmp(&b.free_flow_arrival())
        .then_with(|| a.query.id.cmp(&b.query.id))
}

/// Unassigned queries departing within `window` of `pending[current]`,
/// ordered by free-flow arrival then id.
///
/// `pending` must be sorted by departure.
pub fn form_batch(
    pending: &[Pending],
    assigned: &[bool],
    current: usize,
    window: f64,
) -> Vec<usize> {
    let start = pending[current].query.depart;
    let mut batch: Vec<usize> = (current..pending.len())
        .take_while(|&i| pending[i].query.depart <= start + window + TIME_EPS)
        .filter(|&i| !assigned[i])
        .collect();
    batch.sort_by(|&a, &b| by_free_flow_arrival(&pending[a], &pending[b]));
    batch
}

/// True when any cell `φ` occupies already holds at least `F` vehicles.
pub fn is_free_flow_path_congested<V: LoadView + ?Sized>(
    net: &RoadNetwork,
    view: &V,
    phi: &Path,
) -> bool {
    phi.cells()
        .any(|(edge, t)| f64::from(view.load(edge, t)) >= net.attrs(edge).free_flow_capacity)
}

/// Queries in `batch` (sorted by free-flow arrival) expected to arrive
/// before `base` could.
///
/// The threshold is `base.depart + |φ_base| + π̂(base)`; `base` is always
/// included and placed first. With `max_candidates > 0` the set is cut to
/// that many, keeping the earliest free-flow arrivals.
pub fn define_candidate_set(
    pending: &[Pending],
    batch: &[usize],
    base: usize,
    predictor: &dyn PenaltyPredictor,
    max_candidates: usize,
) -> Vec<usize> {
    let b = &pending[base];
    let xi = b.free_flow_arrival() + predictor.predict(&b.query).max(0.0);
    let mut out = vec![base];
    for &i in batch {
        if i == base {
            continue;
        }
        if pending[i].free_flow_arrival() >= xi {
            break;
        }
        out.push(i);
    }
    if max_candidates > 0 {
        out.truncate(max_candidates);
    }
    out
}

/// Index of the earliest arrival; ties go to the earlier free-flow arrival,
/// then the lower query id.
///
/// Comparisons are exact, so this is a strict total order on candidates.
pub fn select_minimal_arrival(candidates: &[(&Pending, &Path)]) -> Option<usize> {
    candidates
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            a.1.total_arrival
                .total_cmp(&b.1.total_arrival)
                .then_with(|| by_free_flow_arrival(a.0, b.0))
        })
        .map(|(i, _)| i)
}
