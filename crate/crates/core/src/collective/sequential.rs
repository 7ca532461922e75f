use crate::load::{EdgeLoadMatrix, Layered};
use crate::network::RoadNetwork;
use crate::routing::{
    dijkstra_free_flow, slad, tlaa_star, tlat_k, HeuristicCache, Query, RouteError, TopKCache,
};
use crate::time::interval_of;

use super::{Assignment, TablePredictor};

/// Single-query planner used for chronological assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Router {
    /// Free-flow Dijkstra, blind to load.
    Ffnd,
    /// Load-aware search against loads frozen at the departure interval.
    Slad,
    /// Best of the k free-flow shortest routes under current load.
    TlatK(usize),
    /// Load-aware A*.
    Tlaa,
}

/// Plans queries one at a time in order of departure (ties by id), adding
/// each path to the load matrix before the next query is planned.
pub fn assign_sequential(
    net: &RoadNetwork,
    queries: &[Query],
    router: Router,
    background: Option<&EdgeLoadMatrix>,
) -> Assignment {
    let mut order: Vec<&Query> = queries.iter().collect();
    order.sort_by(|a, b| a.depart.total_cmp(&b.depart).then(a.id.cmp(&b.id)));

    let mut elm = EdgeLoadMatrix::for_network(net);
    let horizon = elm.horizon();
    let heuristics = HeuristicCache::new(net);
    let mut topk = match router {
        Router::TlatK(k) => Some(TopKCache::new(k)),
        _ => None,
    };
    let mut paths = Vec::with_capacity(queries.len());
    let mut failures = Vec::new();

    for q in order {
        let planned = {
            let view = Layered::new(&elm, background);
            match router {
                Router::Ffnd => q
                    .validate(net, horizon)
                    .and_then(|_| dijkstra_free_flow(net, q)),
                Router::Slad => slad(net, &view, q, heuristics.get(q.destination)),
                Router::Tlaa => tlaa_star(net, &view, q, heuristics.get(q.destination)),
                Router::TlatK(_) => {
                    let cache = topk.as_mut().expect("top-k cache");
                    q.validate(net, horizon)
                        .and_then(|_| cache.candidates(net, q))
                        .and_then(|c| tlat_k(net, &view, q, &c))
                }
            }
        };
        match planned {
            Ok(path) if interval_of(path.total_arrival) < horizon => {
                elm.add_path_load(&path)
                    .expect("planned path lies within the horizon");
                paths.push(path);
            }
            Ok(path) => failures.push(RouteError::HorizonOverflow(path.query_id)),
            Err(e) => failures.push(e),
        }
    }
    Assignment {
        paths,
        failures,
        elm,
    }
}

/// Trains a [`TablePredictor`] from a chronological load-aware run over `queries`.
pub fn warm_up_predictor(
    net: &RoadNetwork,
    queries: &[Query],
    background: Option<&EdgeLoadMatrix>,
) -> TablePredictor {
    let run = assign_sequential(net, queries, Router::Tlaa, background);
    let by_id: std::collections::HashMap<_, _> = queries.iter().map(|q| (q.id, q)).collect();
    TablePredictor::train(run.paths.iter().map(|p| (by_id[&p.query_id], p.penalty())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collective::PenaltyPredictor;
    use crate::network::{EdgeId, NodeId};
    use crate::routing::fixtures;

    #[test]
    fn later_queries_see_earlier_load() {
        // Capacity 1 on s→m: only the fourth vehicle sees load F + 2 and detours.
        let net = fixtures::net(
            4,
            &[
                (0, 1, 0.1, 1.0),
                (1, 3, 0.1, 5.0),
                (0, 2, 0.15, 5.0),
                (2, 3, 0.15, 5.0),
            ],
            20,
        );
        let queries: Vec<_> = (0..4)
            .map(|i| Query::new(i, NodeId(0), NodeId(3), 0.5))
            .collect();
        let ffnd = assign_sequential(&net, &queries, Router::Ffnd, None);
        assert!(ffnd
            .paths
            .iter()
            .all(|p| p.edges() == vec![EdgeId(0), EdgeId(1)]));

        let tlaa = assign_sequential(&net, &queries, Router::Tlaa, None);
        assert_eq!(tlaa.paths.len(), 4);
        let detours = tlaa
            .paths
            .iter()
            .filter(|p| p.edges() == vec![EdgeId(2), EdgeId(3)])
            .count();
        assert_eq!(detours, 1);
        assert_eq!(tlaa.elm.get(EdgeId(0), 0), 3);

        let predictor = warm_up_predictor(&net, &queries, None);
        assert!(predictor.predict(&queries[0]) > 0.0);
    }

    #[test]
    fn failures_are_collected() {
        let net = fixtures::line();
        let queries = vec![
            Query::new(1, NodeId(0), NodeId(3), 0.0),
            Query::new(2, NodeId(0), NodeId(2), 19.9),
            Query::new(3, NodeId(0), NodeId(2), 1.0),
        ];
        for router in [Router::Ffnd, Router::Slad, Router::TlatK(2), Router::Tlaa] {
            let run = assign_sequential(&net, &queries, router, None);
            assert_eq!(run.paths.len(), 1, "{router:?}");
            assert_eq!(run.failures.len(), 2, "{router:?}");
        }
    }
}
