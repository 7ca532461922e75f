//! Single-query routing: free-flow Dijkstra, the load-aware A* search and its
//! snapshot variant, Yen's k shortest paths and top-k selection.

mod dijkstra;
mod evaluate;
mod heuristic_cache;
mod tlaa;
mod topk;
mod yen;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{EdgeId, NodeId, RoadNetwork};
use crate::time::interval_of;

pub use dijkstra::dijkstra_free_flow;
pub use evaluate::{evaluate_path_under_elm, free_flow_cost};
pub use heuristic_cache::HeuristicCache;
pub use tlaa::{slad, tlaa_star};
pub use topk::{tlat_k, TopKCache};
pub use yen::yen_k_shortest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QueryId(pub u64);

impl fmt::Display for QueryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A request to travel from `source` to `destination` leaving at `depart`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Query {
    pub id: QueryId,
    pub source: NodeId,
    pub destination: NodeId,
    /// Interval units.
    pub depart: f64,
}

impl Query {
    pub fn new(id: u64, source: NodeId, destination: NodeId, depart: f64) -> Self {
        Self {
            id: QueryId(id),
            source,
            destination,
            depart,
        }
    }

    pub fn validate(&self, net: &RoadNetwork, horizon: u32) -> Result<(), RouteError> {
        let invalid = |reason: String| RouteError::InvalidQuery {
            query: self.id,
            reason,
        };
        let n = net.node_count();
        if self.source.index() >= n || self.destination.index() >= n {
            return Err(invalid("endpoint not in network".into()));
        }
        if self.source == self.destination {
            return Err(invalid("source equals destination".into()));
        }
        if !(self.depart >= 0.0) || interval_of(self.depart) >= horizon {
            return Err(invalid(format!(
                "departure {} outside [0, {horizon})",
                self.depart
            )));
        }
        Ok(())
    }
}

/// One traversed edge with entry and exit times in interval units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hop {
    pub edge: EdgeId,
    pub entry: f64,
    pub exit: f64,
}

/// A time-annotated route.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub query_id: QueryId,
    pub depart: f64,
    pub hops: Vec<Hop>,
    /// Arrival at the destination.
    pub total_arrival: f64,
    /// Duration of the query's free-flow shortest path, `|φ|`.
    pub free_flow_cost: f64,
}

impl Path {
    pub fn duration(&self) -> f64 {
        self.total_arrival - self.depart
    }

    /// Congestion penalty `π = duration − |φ|`.
    pub fn penalty(&self) -> f64 {
        self.duration() - self.free_flow_cost
    }

    pub fn edges(&self) -> Vec<EdgeId> {
        self.hops.iter().map(|h| h.edge).collect()
    }

    /// Visited nodes, source first.
    pub fn nodes(&self, net: &RoadNetwork) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.hops.len() + 1);
        if let Some(first) = self.hops.first() {
            out.push(net.edge(first.edge).src);
        }
        out.extend(self.hops.iter().map(|h| net.edge(h.edge).dst));
        out
    }

    /// `(edge, interval)` cells this path occupies.
    pub fn cells(&self) -> impl Iterator<Item = (EdgeId, u32)> + '_ {
        self.hops
            .iter()
            .flat_map(|h| (interval_of(h.entry)..=interval_of(h.exit)).map(move |t| (h.edge, t)))
    }

    /// Free-flow timing of an edge sequence starting at `depart`.
    pub fn free_flow(net: &RoadNetwork, query_id: QueryId, depart: f64, edges: &[EdgeId]) -> Self {
        let mut t = depart;
        let hops = edges
            .iter()
            .map(|&edge| {
                let entry = t;
                t += net.attrs(edge).min_travel_time;
                Hop {
                    edge,
                    entry,
                    exit: t,
                }
            })
            .collect();
        Self {
            query_id,
            depart,
            hops,
            total_arrival: t,
            free_flow_cost: t - depart,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RouteError {
    #[error("query {0}: destination unreachable")]
    NoPath(QueryId),
    #[error("query {0}: arrival would exceed the planning horizon")]
    HorizonOverflow(QueryId),
    #[error("query {query}: {reason}")]
    InvalidQuery { query: QueryId, reason: String },
    #[error("edge sequence breaks at hop {0}")]
    Disconnected(usize),
}

impl RouteError {
    pub fn query(&self) -> Option<QueryId> {
        match self {
            RouteError::NoPath(q) | RouteError::HorizonOverflow(q) => Some(*q),
            RouteError::InvalidQuery { query, .. } => Some(*query),
            RouteError::Disconnected(_) => None,
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_validation() {
        let net = fixtures::line();
        assert!(Query::new(1, NodeId(0), NodeId(2), 0.0)
            .validate(&net, 20)
            .is_ok());
        assert!(Query::new(1, NodeId(0), NodeId(0), 0.0)
            .validate(&net, 20)
            .is_err());
        assert!(Query::new(1, NodeId(0), NodeId(9), 0.0)
            .validate(&net, 20)
            .is_err());
        assert!(Query::new(1, NodeId(0), NodeId(2), 20.0)
            .validate(&net, 20)
            .is_err());
        assert!(Query::new(1, NodeId(0), NodeId(2), -1.0)
            .validate(&net, 20)
            .is_err());
    }

    #[test]
    fn path_cells_cover_spanned_intervals() {
        let net = fixtures::line();
        let p = Path::free_flow(&net, QueryId(0), 0.95, &[EdgeId(0), EdgeId(1)]);
        let cells: Vec<_> = p.cells().collect();
        assert_eq!(cells, vec![(EdgeId(0), 0), (EdgeId(0), 1), (EdgeId(1), 1)]);
        assert_eq!(p.nodes(&net), vec![NodeId(0), NodeId(1), NodeId(2)]);
        assert!(p.penalty().abs() < 1e-12);
    }
}
