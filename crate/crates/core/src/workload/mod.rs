//! Query sets: file ingestion, seeded synthetic generation and free-flow
//! precomputation.

mod generate;
mod io;

use thiserror::Error;

use crate::network::RoadNetwork;
use crate::routing::{dijkstra_free_flow, Path, Query, QueryId};

pub use generate::{generate_queries, hotspot_nodes, QueryGenSpec};
pub use io::{load_queries, save_queries};

#[derive(Debug, Error)]
pub enum WorkloadError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown node {label}")]
    UnknownNode { line: usize, label: u64 },
    #[error("line {line}: source and destination are both {label}")]
    SameEndpoints { line: usize, label: u64 },
    #[error("line {line}: duplicate query id {id}")]
    DuplicateId { line: usize, id: u64 },
    #[error("line {line}: departure {depart_s} s is outside the planning horizon")]
    OutOfHorizon { line: usize, depart_s: f64 },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Queries in ascending departure order (ties by id), optionally annotated
/// with their free-flow routes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuerySet {
    queries: Vec<Query>,
    free_flow: Vec<Option<Path>>,
}

impl QuerySet {
    /// Sorts `queries` by departure then id.
    pub fn new(mut queries: Vec<Query>) -> Self {
        queries.sort_by(|a, b| a.depart.total_cmp(&b.depart).then(a.id.cmp(&b.id)));
        Self {
            queries,
            free_flow: Vec::new(),
        }
    }

    pub fn queries(&self) -> &[Query] {
        &self.queries
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn is_precomputed(&self) -> bool {
        self.free_flow.len() == self.queries.len()
    }

    /// Free-flow route of the `i`-th query, once precomputed; `None` when unreachable.
    pub fn free_flow(&self, i: usize) -> Option<&Path> {
        self.free_flow.get(i).and_then(Option::as_ref)
    }

    /// Queries whose destination cannot be reached.
    pub fn unreachable(&self) -> Vec<QueryId> {
        self.queries
            .iter()
            .zip(&self.free_flow)
            .filter(|(_, ff)| ff.is_none())
            .map(|(q, _)| q.id)
            .collect()
    }

    /// Queries with a free-flow route.
    pub fn reachable(&self) -> Vec<Query> {
        self.queries
            .iter()
            .zip(&self.free_flow)
            .filter(|(_, ff)| ff.is_some())
            .map(|(q, _)| *q)
            .collect()
    }
}

/// Annotates every query with its free-flow route; unreachable ones get `None`.
pub fn precompute_free_flow(net: &RoadNetwork, qs: &QuerySet) -> QuerySet {
    QuerySet {
        queries: qs.queries.clone(),
        free_flow: qs
            .queries
            .iter()
            .map(|q| dijkstra_free_flow(net, q).ok())
            .collect(),
    }
}
