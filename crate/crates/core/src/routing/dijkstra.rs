use std::collections::BinaryHeap;

use crate::heap::MinScored;
use crate::network::{EdgeId, NodeId, RoadNetwork};
use crate::time::TIME_EPS;

use super::{Path, Query, RouteError};

/// Nodes and edges a search may not use.
#[derive(Debug, Default)]
pub(crate) struct Bans {
    pub nodes: Vec<bool>,
    pub edges: Vec<bool>,
}

impl Bans {
    pub fn new(net: &RoadNetwork) -> Self {
        Self {
            nodes: vec![false; net.node_count()],
            edges: vec![false; net.edge_count()],
        }
    }
}

/// Free-flow shortest edge sequence from `source` to `dest`.
///
/// Among equal-cost routes (within the time tolerance) each node keeps the
/// lowest-id predecessor, which makes the result independent of heap order.
pub(crate) fn free_flow_route(
    net: &RoadNetwork,
    source: NodeId,
    dest: NodeId,
    bans: Option<&Bans>,
) -> Option<Vec<EdgeId>> {
    let n = net.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<EdgeId>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source.index()] = 0.0;
    heap.push(MinScored {
        score: 0.0,
        node: source.0,
    });
    while let Some(MinScored { node, .. }) = heap.pop() {
        let u = node as usize;
        if settled[u] {
            continue;
        }
        settled[u] = true;
        if u == dest.index() {
            break;
        }
        for &e in net.out_edges(NodeId(node)) {
            let edge = net.edge(e);
            let v = edge.dst.index();
            if v == source.index() {
                continue;
            }
            if let Some(b) = bans {
                if b.edges[e.index()] || b.nodes[v] {
                    continue;
                }
            }
            let cand = dist[u] + edge.attrs.min_travel_time;
            if cand < dist[v] - TIME_EPS {
                dist[v] = cand;
                pred[v] = Some(e);
                heap.push(MinScored {
                    score: cand,
                    node: edge.dst.0,
                });
            } else if cand <= dist[v] + TIME_EPS {
                let current = pred[v].map(|p| net.edge(p).src);
                if current.is_none_or(|c| NodeId(node) < c) {
                    pred[v] = Some(e);
                }
            }
        }
    }
    if !settled[dest.index()] {
        return None;
    }
    Some(unwind(net, &pred, source, dest))
}

/// Follows predecessor edges back from `dest`.
pub(crate) fn unwind(
    net: &RoadNetwork,
    pred: &[Option<EdgeId>],
    source: NodeId,
    dest: NodeId,
) -> Vec<EdgeId> {
    let mut edges = Vec::new();
    let mut at = dest;
    while at != source {
        let e = pred[at.index()].expect("predecessor chain reaches the source");
        edges.push(e);
        at = net.edge(e).src;
    }
    edges.reverse();
    edges
}

/// Shortest route ignoring load. Arrival is `depart + Σ Υ`.
pub fn dijkstra_free_flow(net: &RoadNetwork, q: &Query) -> Result<Path, RouteError> {
    q.validate(net, u32::MAX)?;
    let edges =
        free_flow_route(net, q.source, q.destination, None).ok_or(RouteError::NoPath(q.id))?;
    Ok(Path::free_flow(net, q.id, q.depart, &edges))
}
