use crate::load::{traverse, LoadView};
use crate::network::{EdgeId, RoadNetwork};
use crate::time::interval_of;

use super::{Hop, Path, QueryId, RouteError};

/// Sum of `Υ` along `edges`, accumulated in order.
pub fn free_flow_cost(net: &RoadNetwork, edges: &[EdgeId]) -> f64 {
    edges.iter().map(|&e| net.attrs(e).min_travel_time).sum()
}

/// Times `edges` hop by hop from `depart` under the loads in `view`.
///
/// `free_flow_cost` on the result is the sequence's own `Σ Υ`; callers that
/// know the query's true free-flow optimum should overwrite it.
pub fn evaluate_path_under_elm<V: LoadView + ?Sized>(
    net: &RoadNetwork,
    view: &V,
    query_id: QueryId,
    edges: &[EdgeId],
    depart: f64,
) -> Result<Path, RouteError> {
    let horizon = view.horizon();
    let mut hops = Vec::with_capacity(edges.len());
    let mut t = depart;
    let mut at = None;
    for (i, &edge) in edges.iter().enumerate() {
        let e = net.edge(edge);
        if at.is_some_and(|node| node != e.src) {
            return Err(RouteError::Disconnected(i));
        }
        let tau = interval_of(t);
        if tau >= horizon {
            return Err(RouteError::HorizonOverflow(query_id));
        }
        let exit = traverse(t, f64::from(view.load(edge, tau)), &e.attrs);
        if interval_of(exit) >= horizon {
            return Err(RouteError::HorizonOverflow(query_id));
        }
        hops.push(Hop {
            edge,
            entry: t,
            exit,
        });
        t = exit;
        at = Some(e.dst);
    }
    Ok(Path {
        query_id,
        depart,
        hops,
        total_arrival: t,
        free_flow_cost: free_flow_cost(net, edges),
    })
}
