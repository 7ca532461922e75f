use std::collections::BinaryHeap;

use super::{NodeId, RoadNetwork};
use crate::heap::MinScored;

/// Exact free-flow distance (sum of `Υ`) from every node to `dest`.
///
/// Computed by a reverse Dijkstra search. Unreachable nodes get `+∞`. Since
/// load only ever lengthens a traversal, these are admissible lower bounds
/// for any load-aware route.
pub fn free_flow_heuristic(net: &RoadNetwork, dest: NodeId) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; net.node_count()];
    let mut settled = vec![false; net.node_count()];
    let mut heap = BinaryHeap::new();
    dist[dest.index()] = 0.0;
    heap.push(MinScored {
        score: 0.0,
        node: dest.0,
    });
    while let Some(MinScored { score, node }) = heap.pop() {
        let v = node as usize;
        if settled[v] {
            continue;
        }
        settled[v] = true;
        for &e in net.in_edges(NodeId(node)) {
            let edge = net.edge(e);
            let u = edge.src.index();
            let cand = score + edge.attrs.min_travel_time;
            if cand < dist[u] {
                dist[u] = cand;
                heap.push(MinScored {
                    score: cand,
                    node: edge.src.0,
                });
            }
        }
    }
    dist
}
