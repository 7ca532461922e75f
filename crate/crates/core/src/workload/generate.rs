use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::network::{NodeId, RoadNetwork};
use crate::routing::Query;
use crate::time::interval_of;

use super::{QuerySet, WorkloadError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryGenSpec {
    pub count: usize,
    /// Departure window `[start, end)` in seconds.
    pub window_s: (f64, f64),
    /// Probability that a query has one endpoint in the hotspot set.
    pub hotspot_bias: f64,
    /// Size of the hotspot set.
    pub hotspot_size: usize,
}

impl QueryGenSpec {
    /// Parameter summary for file headers.
    pub fn describe(&self, seed: u64) -> String {
        format!(
            "seed={seed} count={} window_s={}..{} hotspot_bias={} hotspot_size={}",
            self.count, self.window_s.0, self.window_s.1, self.hotspot_bias, self.hotspot_size
        )
    }
}

/// The `size` nodes closest (in hops, ignoring direction) to the network's
/// centre. The centre is the node nearest the coordinate centroid, or a
/// seeded random node when coordinates are missing.
pub fn hotspot_nodes(net: &RoadNetwork, size: usize, rng: &mut impl Rng) -> Vec<NodeId> {
    let n = net.node_count();
    if n == 0 || size == 0 {
        return Vec::new();
    }
    let coords: Option<Vec<(f64, f64)>> = net.nodes().map(|v| net.node_coords(v)).collect();
    let centre = match coords {
        Some(c) => {
            let (sx, sy) = c.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
            let (cx, cy) = (sx / n as f64, sy / n as f64);
            let d = |&(x, y): &(f64, f64)| (x - cx).powi(2) + (y - cy).powi(2);
            let best = (0..n)
                .min_by(|&a, &b| d(&c[a]).total_cmp(&d(&c[b])).then(a.cmp(&b)))
                .expect("nonempty");
            NodeId(best as u32)
        }
        None => NodeId(rng.gen_range(0..n as u32)),
    };
    let mut seen = vec![false; n];
    let mut out = Vec::with_capacity(size);
    let mut queue = VecDeque::from([centre]);
    seen[centre.index()] = true;
    while let Some(v) = queue.pop_front() {
        out.push(v);
        if out.len() == size {
            break;
        }
        let mut next: Vec<NodeId> = net
            .out_edges(v)
            .iter()
            .map(|&e| net.edge(e).dst)
            .chain(net.in_edges(v).iter().map(|&e| net.edge(e).src))
            .collect();
        next.sort();
        next.dedup();
        for u in next {
            if !seen[u.index()] {
                seen[u.index()] = true;
                queue.push_back(u);
            }
        }
    }
    out
}

/// Seeded synthetic queries.
///
/// Endpoints are uniform over all nodes, except that with probability
/// `hotspot_bias` either the source or the destination (a fair coin decides)
/// is drawn from the hotspot set. Departures are whole seconds drawn
/// uniformly from the window. Ids follow departure order.
pub fn generate_queries(
    net: &RoadNetwork,
    spec: &QueryGenSpec,
    seed: u64,
) -> Result<QuerySet, WorkloadError> {
    let cfg = net.config();
    let n = net.node_count();
    if spec.count == 0 {
        return Err(WorkloadError::Invalid(
            "query count must be at least 1".into(),
        ));
    }
    if n < 2 {
        return Err(WorkloadError::Invalid(
            "network needs at least two nodes".into(),
        ));
    }
    if !(0.0..=1.0).contains(&spec.hotspot_bias) {
        return Err(WorkloadError::Invalid(format!(
            "hotspot bias {} not in [0, 1]",
            spec.hotspot_bias
        )));
    }
    let (start, end) = (spec.window_s.0.ceil(), spec.window_s.1.ceil());
    let last = cfg.time_to_intervals(end - 1.0);
    if !(end > start)
        || cfg.time_to_intervals(start) < 0.0
        || interval_of(last) >= cfg.horizon_intervals
    {
        return Err(WorkloadError::Invalid(format!(
            "departure window {:?} must be nonempty and inside the horizon",
            spec.window_s
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hotspots = hotspot_nodes(net, spec.hotspot_size.max(1), &mut rng);
    let uniform_other = |rng: &mut ChaCha8Rng, not: NodeId| {
        let pick = rng.gen_range(0..n as u32 - 1);
        NodeId(if pick >= not.0 { pick + 1 } else { pick })
    };

    let mut drawn: Vec<(f64, NodeId, NodeId)> = Vec::with_capacity(spec.count);
    for _ in 0..spec.count {
        let (src, dst) = if rng.gen_bool(spec.hotspot_bias) {
            let hot = hotspots[rng.gen_range(0..hotspots.len())];
            if rng.gen_bool(0.5) {
                (hot, uniform_other(&mut rng, hot))
            } else {
                (uniform_other(&mut rng, hot), hot)
            }
        } else {
            let src = NodeId(rng.gen_range(0..n as u32));
            (src, uniform_other(&mut rng, src))
        };
        let depart_s = rng.gen_range(start as i64..end as i64) as f64;
        drawn.push((depart_s, src, dst));
    }
    drawn.sort_by(|a, b| a.0.total_cmp(&b.0));
    let queries = drawn
        .into_iter()
        .enumerate()
        .map(|(i, (s, src, dst))| Query::new(i as u64, src, dst, cfg.time_to_intervals(s)))
        .collect();
    Ok(QuerySet::new(queries))
}
