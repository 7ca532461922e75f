//! Collective batch assignment and the chronological single-query planners
//! it is compared against.

mod batch;
mod csmat;
mod pem;
mod predictor;
mod sequential;

use crate::load::EdgeLoadMatrix;
use crate::routing::{Path, RouteError};

pub use batch::{
    define_candidate_set, form_batch, is_free_flow_path_congested, select_minimal_arrival, Pending,
};
pub use csmat::{cs_mat, BatchConfig, CsMatStats, Recompute};
pub use pem::PathEdgeMatrix;
pub use predictor::{PenaltyPredictor, TablePredictor, ZeroPredictor};
pub use sequential::{assign_sequential, warm_up_predictor, Router};

/// Result of planning a query set.
#[derive(Debug, Clone)]
pub struct Assignment {
    /// Planned paths in the order they were committed.
    pub paths: Vec<Path>,
    /// Queries that could not be routed.
    pub failures: Vec<RouteError>,
    /// Load contributed by the planned paths (background excluded).
    pub elm: EdgeLoadMatrix,
}

impl Assignment {
    /// Sum of planned arrival times.
    pub fn total_arrival(&self) -> f64 {
        self.paths.iter().map(|p| p.total_arrival).sum()
    }
}
