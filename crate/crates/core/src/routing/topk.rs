use std::collections::HashMap;

use crate::load::LoadView;
use crate::network::{EdgeId, NodeId, RoadNetwork};
use crate::time::TIME_EPS;

use super::{evaluate_path_under_elm, yen_k_shortest, Path, Query, RouteError};

/// Picks the earliest-arriving of the precomputed free-flow candidates.
///
/// Each candidate is re-timed under `view`; candidates that overflow the
/// horizon are skipped and ties go to the better free-flow rank. The
/// returned path's `free_flow_cost` is that of the rank-1 candidate.
pub fn tlat_k<V: LoadView + ?Sized>(
    net: &RoadNetwork,
    view: &V,
    q: &Query,
    candidates: &[Path],
) -> Result<Path, RouteError> {
    let Some(first) = candidates.first() else {
        return Err(RouteError::NoPath(q.id));
    };
    let free_flow = first.free_flow_cost;
    let mut best: Option<Path> = None;
    for cand in candidates {
        let edges = cand.edges();
        match evaluate_path_under_elm(net, view, q.id, &edges, q.depart) {
            Ok(p) => {
                if best
                    .as_ref()
                    .is_none_or(|b| p.total_arrival < b.total_arrival - TIME_EPS)
                {
                    best = Some(p);
                }
            }
            Err(RouteError::HorizonOverflow(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let mut path = best.ok_or(RouteError::NoPath(q.id))?;
    path.free_flow_cost = free_flow;
    Ok(path)
}

/// Memoized Yen candidates per `(source, destination)` pair.
#[derive(Debug, Default)]
pub struct TopKCache {
    k: usize,
    routes: HashMap<(NodeId, NodeId), Vec<Vec<EdgeId>>>,
}

impl TopKCache {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            routes: HashMap::new(),
        }
    }

    /// Candidates for `q`, timed at free flow from its departure.
    pub fn candidates(&mut self, net: &RoadNetwork, q: &Query) -> Result<Vec<Path>, RouteError> {
        let key = (q.source, q.destination);
        if !self.routes.contains_key(&key) {
            let paths = yen_k_shortest(net, q, self.k)?;
            self.routes
                .insert(key, paths.iter().map(Path::edges).collect());
        }
        Ok(self.routes[&key]
            .iter()
            .map(|edges| Path::free_flow(net, q.id, q.depart, edges))
            .collect())
    }
}
