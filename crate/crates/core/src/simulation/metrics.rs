use serde::{Deserialize, Serialize};

use crate::load::EdgeLoadMatrix;
use crate::network::RoadNetwork;

use super::ReplayResult;

/// Summary measures of one replayed run. Durations are in minutes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// No query completed.
    pub empty: bool,
    pub completed: usize,
    pub overflowed: usize,
    /// Average journey time.
    pub ajt: f64,
    /// Free-flow capacity utilisation: mean over all cells of `min(l/F, 1)`.
    pub ffcu: f64,
    /// Load distribution: share of cells with any load.
    pub ld: f64,
    pub penalty_mean: f64,
    /// Population standard deviation.
    pub penalty_std: f64,
    /// Counts per one-minute penalty bin; bin `i` covers `[i, i + 1)`.
    pub penalty_histogram: Vec<u64>,
}

impl MetricsReport {
    fn empty(overflowed: usize) -> Self {
        Self {
            empty: true,
            completed: 0,
            overflowed,
            ajt: 0.0,
            ffcu: 0.0,
            ld: 0.0,
            penalty_mean: 0.0,
            penalty_std: 0.0,
            penalty_histogram: Vec::new(),
        }
    }
}

/// Utilisation `(FFCU, LD)` of `controlled + background` over every
/// `(edge, interval)` cell of the network and horizon.
pub fn utilisation(
    net: &RoadNetwork,
    controlled: &EdgeLoadMatrix,
    background: Option<&EdgeLoadMatrix>,
) -> (f64, f64) {
    let cells = net.edge_count() as f64 * f64::from(controlled.horizon());
    if cells == 0.0 {
        return (0.0, 0.0);
    }
    let mut total = controlled.clone();
    if let Some(bg) = background {
        total.add_matrix(bg);
    }
    let (mut sigma, mut used) = (0.0, 0u64);
    for (edge, _, load) in total.iter_nonzero() {
        sigma += (f64::from(load) / net.attrs(edge).free_flow_capacity).min(1.0);
        used += 1;
    }
    (sigma / cells, used as f64 / cells)
}

/// Journey-time, utilisation and fairness measures for a replay.
///
/// Penalties use each path's `free_flow_cost` as the free-flow duration.
pub fn compute_metrics(
    net: &RoadNetwork,
    result: &ReplayResult,
    background: Option<&EdgeLoadMatrix>,
) -> MetricsReport {
    let overflowed = result.overflowed.len();
    let (ffcu, ld) = utilisation(net, &result.elm, background);
    if result.paths.is_empty() {
        return MetricsReport {
            ffcu,
            ld,
            ..MetricsReport::empty(overflowed)
        };
    }
    let cfg = net.config();
    let n = result.paths.len() as f64;
    let ajt = result
        .paths
        .iter()
        .map(|p| cfg.intervals_to_minutes(p.duration()))
        .sum::<f64>()
        / n;
    let penalties: Vec<f64> = result
        .paths
        .iter()
        .map(|p| cfg.intervals_to_minutes(p.penalty()))
        .collect();
    let mean = penalties.iter().sum::<f64>() / n;
    let var = penalties.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / n;
    MetricsReport {
        empty: false,
        completed: result.paths.len(),
        overflowed,
        ajt,
        ffcu,
        ld,
        penalty_mean: mean,
        penalty_std: var.sqrt(),
        penalty_histogram: histogram(&penalties),
    }
}

fn histogram(minutes: &[f64]) -> Vec<u64> {
    // Snap float noise just below a bin edge into the upper bin.
    let bin = |p: f64| (p + 1e-9).max(0.0).floor() as usize;
    let bins = minutes.iter().map(|&p| bin(p)).max().map_or(0, |m| m + 1);
    let mut out = vec![0; bins];
    for &p in minutes {
        out[bin(p)] += 1;
    }
    out
}

/// End-to-end time per query: planning wall time per query plus the AJT, in minutes.
pub fn end_to_end_minutes(ajt_minutes: f64, per_query_runtime_s: f64) -> f64 {
    ajt_minutes + per_query_runtime_s / 60.0
}
