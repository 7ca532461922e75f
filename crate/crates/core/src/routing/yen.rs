use std::cmp::Ordering;

use crate::network::{EdgeId, RoadNetwork};

use super::dijkstra::{free_flow_route, Bans};
use super::{free_flow_cost, Path, Query, RouteError};

#[derive(Debug, Clone, PartialEq)]
struct Candidate {
    cost: f64,
    edges: Vec<EdgeId>,
}

fn by_cost_then_edges(a: &Candidate, b: &Candidate) -> Ordering {
    a.cost
        .total_cmp(&b.cost)
        .then_with(|| a.edges.cmp(&b.edges))
}

/// Up to `k` loopless routes in nondecreasing free-flow cost (Yen's algorithm).
///
/// Equal costs are ordered by edge-id sequence, so the output is deterministic.
pub fn yen_k_shortest(net: &RoadNetwork, q: &Query, k: usize) -> Result<Vec<Path>, RouteError> {
    q.validate(net, u32::MAX)?;
    if k == 0 {
        return Ok(Vec::new());
    }
    let first =
        free_flow_route(net, q.source, q.destination, None).ok_or(RouteError::NoPath(q.id))?;
    let mut accepted = vec![Candidate {
        cost: free_flow_cost(net, &first),
        edges: first,
    }];
    let mut pool: Vec<Candidate> = Vec::new();
    let mut bans = Bans::new(net);

    while accepted.len() < k {
        let prev = accepted.last().expect("nonempty").edges.clone();
        let mut spur_node = q.source;
        for i in 0..prev.len() {
            let root = &prev[..i];
            bans.nodes.iter_mut().for_each(|b| *b = false);
            bans.edges.iter_mut().for_each(|b| *b = false);
            for p in &accepted {
                if p.edges.len() > i && &p.edges[..i] == root {
                    bans.edges[p.edges[i].index()] = true;
                }
            }
            for &e in root {
                bans.nodes[net.edge(e).src.index()] = true;
            }
            if let Some(spur) = free_flow_route(net, spur_node, q.destination, Some(&bans)) {
                let mut edges = root.to_vec();
                edges.extend(spur);
                let cand = Candidate {
                    cost: free_flow_cost(net, &edges),
                    edges,
                };
                if !pool.iter().any(|c| c.edges == cand.edges)
                    && !accepted.iter().any(|c| c.edges == cand.edges)
                {
                    pool.push(cand);
                }
            }
            spur_node = net.edge(prev[i]).dst;
        }
        let Some(pos) = pool
            .iter()
            .enumerate()
            .min_by(|a, b| by_cost_then_edges(a.1, b.1))
            .map(|(i, _)| i)
        else {
            break;
        };
        accepted.push(pool.swap_remove(pos));
    }

    Ok(accepted
        .into_iter()
        .map(|c| Path::free_flow(net, q.id, q.depart, &c.edges))
        .collect())
}
