use std::collections::BinaryHeap;

use crate::heap::MinScored;
use crate::load::{traverse, LoadView, Snapshot};
use crate::network::{EdgeId, NodeId, RoadNetwork};
use crate::time::{interval_of, TIME_EPS};

use super::dijkstra::unwind;
use super::{evaluate_path_under_elm, Path, Query, RouteError};

/// Earliest-arrival route under the time-varying loads in `view`.
///
/// A* ordered by `B(v) + h(v)` where `B` is the arrival time and `h` the
/// free-flow distance to the destination. Loads only lengthen traversals, so
/// `h` is consistent, and the arrival function is FIFO, so a settled node is
/// never improved later.
///
/// Equal-arrival alternatives resolve to the lowest-id predecessor at every
/// node. To see all of them the search keeps popping entries whose f-value
/// ties the destination's. On an empty matrix this reproduces
/// [`dijkstra_free_flow`](super::dijkstra_free_flow) exactly.
pub fn tlaa_star<V: LoadView + ?Sized>(
    net: &RoadNetwork,
    view: &V,
    q: &Query,
    heuristic: &[f64],
) -> Result<Path, RouteError> {
    q.validate(net, view.horizon())?;
    let horizon = view.horizon();
    let n = net.node_count();
    let (s, d) = (q.source.index(), q.destination.index());
    if !heuristic[s].is_finite() {
        return Err(RouteError::NoPath(q.id));
    }

    let mut best = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<EdgeId>> = vec![None; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut overflowed = false;
    let mut dest_f: Option<f64> = None;

    best[s] = q.depart;
    heap.push(MinScored {
        score: q.depart + heuristic[s],
        node: q.source.0,
    });
    while let Some(MinScored { score, node }) = heap.pop() {
        if dest_f.is_some_and(|f| score > f + TIME_EPS) {
            break;
        }
        let u = node as usize;
        if closed[u] {
            continue;
        }
        closed[u] = true;
        if u == d {
            dest_f = Some(score);
            continue;
        }
        let t = best[u];
        let tau = interval_of(t);
        if tau >= horizon {
            overflowed = true;
            continue;
        }
        for &e in net.out_edges(NodeId(node)) {
            let edge = net.edge(e);
            let v = edge.dst.index();
            if v == s || !heuristic[v].is_finite() {
                continue;
            }
            let exit = traverse(t, f64::from(view.load(e, tau)), &edge.attrs);
            if interval_of(exit) >= horizon {
                overflowed = true;
                continue;
            }
            if exit < best[v] - TIME_EPS {
                if closed[v] {
                    // Unreachable with a consistent heuristic; keep the settled value.
                    continue;
                }
                best[v] = exit;
                pred[v] = Some(e);
                heap.push(MinScored {
                    score: exit + heuristic[v],
                    node: edge.dst.0,
                });
            } else if exit <= best[v] + TIME_EPS {
                let current = pred[v].map(|p| net.edge(p).src);
                if current.is_none_or(|c| NodeId(node) < c) {
                    pred[v] = Some(e);
                }
            }
        }
    }

    if dest_f.is_none() {
        return Err(if overflowed {
            RouteError::HorizonOverflow(q.id)
        } else {
            RouteError::NoPath(q.id)
        });
    }
    let edges = unwind(net, &pred, q.source, q.destination);
    let mut path = evaluate_path_under_elm(net, view, q.id, &edges, q.depart)?;
    path.free_flow_cost = heuristic[s];
    Ok(path)
}

/// Load-aware search against loads frozen at the departure interval.
///
/// Times on the returned path are estimates under that frozen view.
pub fn slad<V: LoadView + ?Sized>(
    net: &RoadNetwork,
    view: &V,
    q: &Query,
    heuristic: &[f64],
) -> Result<Path, RouteError> {
    let frozen = Snapshot::new(view, interval_of(q.depart.max(0.0)));
    tlaa_star(net, &frozen, q, heuristic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::load::EdgeLoadMatrix;
    use crate::network::free_flow_heuristic;
    use crate::routing::{dijkstra_free_flow, fixtures};

    fn run(net: &RoadNetwork, elm: &EdgeLoadMatrix, q: &Query) -> Path {
        tlaa_star(net, elm, q, &free_flow_heuristic(net, q.destination)).unwrap()
    }

    #[test]
    fn empty_matrix_matches_dijkstra() {
        let net = fixtures::diamond();
        let elm = EdgeLoadMatrix::for_network(&net);
        let q = Query::new(1, NodeId(0), NodeId(3), 2.4);
        let a = run(&net, &elm, &q);
        let b = dijkstra_free_flow(&net, &q).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert!((a.total_arrival - b.total_arrival).abs() < 1e-9);
        assert!((a.free_flow_cost - 0.2).abs() < 1e-12);
    }

    #[test]
    fn detours_around_congestion() {
        let net = fixtures::diamond();
        let mut elm = EdgeLoadMatrix::for_network(&net);
        elm.set(EdgeId(0), 0, 11).unwrap();
        let q = Query::new(1, NodeId(0), NodeId(3), 0.1);
        let p = run(&net, &elm, &q);
        // Direct: 0.1^(1/6) + 0.2 ≈ 0.881; detour 0.4.
        assert_eq!(p.edges(), vec![EdgeId(2), EdgeId(3)]);
        assert!((p.total_arrival - 0.4).abs() < 1e-9);
        assert!((p.penalty() - 0.1).abs() < 1e-9);
    }

    #[test]
    fn slad_ignores_future_congestion() {
        let net = fixtures::diamond();
        let mut elm = EdgeLoadMatrix::for_network(&net);
        // Depart at 0.95: s→m is entered in interval 0, m→d in interval 1.
        elm.set(EdgeId(1), 1, 30).unwrap();
        let q = Query::new(1, NodeId(0), NodeId(3), 0.95);
        let h = free_flow_heuristic(&net, q.destination);
        let aware = tlaa_star(&net, &elm, &q, &h).unwrap();
        let stat = slad(&net, &elm, &q, &h).unwrap();
        assert_eq!(aware.edges(), vec![EdgeId(2), EdgeId(3)]);
        assert_eq!(stat.edges(), vec![EdgeId(0), EdgeId(1)]);

        // Congestion at the departure interval is seen by both.
        let mut elm = EdgeLoadMatrix::for_network(&net);
        elm.set(EdgeId(0), 0, 30).unwrap();
        let q = Query::new(1, NodeId(0), NodeId(3), 0.5);
        assert_eq!(
            slad(&net, &elm, &q, &h).unwrap().edges(),
            vec![EdgeId(2), EdgeId(3)]
        );
        assert_eq!(
            tlaa_star(&net, &elm, &q, &h).unwrap().edges(),
            vec![EdgeId(2), EdgeId(3)]
        );
    }

    #[test]
    fn failures() {
        let net = fixtures::line();
        let elm = EdgeLoadMatrix::for_network(&net);
        let q = Query::new(3, NodeId(0), NodeId(3), 0.0);
        let h = free_flow_heuristic(&net, q.destination);
        assert_eq!(tlaa_star(&net, &elm, &q, &h), Err(RouteError::NoPath(q.id)));

        let q = Query::new(4, NodeId(0), NodeId(2), 19.85);
        let h = free_flow_heuristic(&net, q.destination);
        assert_eq!(
            tlaa_star(&net, &elm, &q, &h),
            Err(RouteError::HorizonOverflow(q.id))
        );
    }
}
