#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tlan_core::load::{arrival_time, ArrivalQuery};
use tlan_core::network::{generate_grid_network, EdgeSpec, GridSpec, NodeSpec};
use tlan_core::workload::{generate_queries, load_queries, QueryGenSpec, QuerySet};
use tlan_core::{EdgeId, EdgeLoadMatrix, LoadView, NetworkConfig, NodeId, Query, RoadNetwork};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// The six-vehicle example: one corridor 1-2-3-4 and two detours, each one
/// unit (36 s) slower, every road with capacity 4.
pub fn fig1() -> (RoadNetwork, QuerySet) {
    let cfg = NetworkConfig {
        transition_penalty_factor: 0.0,
        ..NetworkConfig::default()
    };
    let net = tlan_core::network::load_network(fixture("fig1.edges.csv"), &cfg).unwrap();
    let qs = load_queries(fixture("fig1.queries.csv"), &net).unwrap();
    (net, qs)
}

/// Edges along a route given by node labels.
pub fn route(net: &RoadNetwork, labels: &[u64]) -> Vec<EdgeId> {
    labels
        .windows(2)
        .map(|w| {
            let a = net.node_by_label(w[0]).unwrap();
            let b = net.node_by_label(w[1]).unwrap();
            net.edge_between(a, b).unwrap()
        })
        .collect()
}

// Congested grid used for the trend, control-factor and determinism checks.
pub const TREND_SEEDS: [u64; 3] = [1, 2, 3];
pub const TREND_MAX_CANDIDATES: usize = 256;

pub fn trend_network(seed: u64) -> RoadNetwork {
    let grid = GridSpec {
        rows: 20,
        cols: 20,
        edge_len_m: 400.0,
        speed_mps: 10.0,
        speed_jitter: 0.0,
    };
    generate_grid_network(&grid, &NetworkConfig::default(), seed).unwrap()
}

pub fn trend_spec() -> QueryGenSpec {
    QueryGenSpec {
        count: 10_000,
        window_s: (0.0, 360.0),
        hotspot_bias: 1.0,
        hotspot_size: 1,
    }
}

pub fn trend_queries(net: &RoadNetwork, seed: u64) -> QuerySet {
    generate_queries(net, &trend_spec(), seed).unwrap()
}

/// Share of loaded cells holding more than `F` vehicles.
pub fn over_capacity_fraction(net: &RoadNetwork, elm: &EdgeLoadMatrix) -> f64 {
    let (mut used, mut over) = (0usize, 0usize);
    for (e, _, l) in elm.iter_nonzero() {
        used += 1;
        if f64::from(l) > net.attrs(e).free_flow_capacity {
            over += 1;
        }
    }
    if used == 0 {
        0.0
    } else {
        over as f64 / used as f64
    }
}

/// Small random digraph: 2..=8 nodes, up to 14 edges, explicit capacities of
/// 1..=5 so random loads congest it.
pub fn random_network(rng: &mut ChaCha8Rng, horizon: u32) -> RoadNetwork {
    let n: u64 = rng.gen_range(2..=8);
    let mut pairs: Vec<(u64, u64)> = (0..n)
        .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    pairs.shuffle(rng);
    let m = rng.gen_range(1..=pairs.len().min(14));
    let edges = pairs[..m]
        .iter()
        .enumerate()
        .map(|(i, &(src, dst))| EdgeSpec {
            label: i as u64,
            src,
            dst,
            length_m: rng.gen_range(100.0..3000.0),
            speed_mps: rng.gen_range(5.0..30.0),
            capacity: Some(f64::from(rng.gen_range(1u32..=5))),
            line: i + 1,
        })
        .collect();
    let nodes = (0..n)
        .map(|label| NodeSpec {
            label,
            coords: None,
            line: 0,
        })
        .collect();
    let cfg = NetworkConfig {
        horizon_intervals: horizon,
        ..NetworkConfig::default()
    };
    RoadNetwork::from_specs(nodes, edges, cfg).unwrap()
}

/// Each cell loaded with probability 1/2, uniformly up to `max_load`.
pub fn random_elm(net: &RoadNetwork, rng: &mut ChaCha8Rng, max_load: u32) -> EdgeLoadMatrix {
    let horizon = net.config().horizon_intervals;
    let mut elm = EdgeLoadMatrix::for_network(net);
    for e in 0..net.edge_count() {
        for t in 0..horizon {
            if rng.gen_bool(0.5) {
                elm.set(EdgeId(e as u32), t, rng.gen_range(0..=max_load))
                    .unwrap();
            }
        }
    }
    elm
}

pub fn random_query(net: &RoadNetwork, rng: &mut ChaCha8Rng, id: u64, max_depart: f64) -> Query {
    let n = net.node_count() as u32;
    let s = rng.gen_range(0..n);
    let mut d = rng.gen_range(0..n - 1);
    if d >= s {
        d += 1;
    }
    Query::new(id, NodeId(s), NodeId(d), rng.gen_range(0.0..max_depart))
}

/// Arrival of an edge sequence under `view`, or `None` past the horizon.
pub fn sequence_arrival<V: LoadView>(
    net: &RoadNetwork,
    view: &V,
    depart: f64,
    edges: &[EdgeId],
) -> Option<f64> {
    let mut t = depart;
    for &e in edges {
        t = arrival_time(view, &ArrivalQuery::new(e, t), net.attrs(e)).ok()?;
    }
    Some(t)
}

/// Every simple path from `source` to `destination`, as edge sequences.
pub fn simple_paths(net: &RoadNetwork, source: NodeId, destination: NodeId) -> Vec<Vec<EdgeId>> {
    fn walk(
        net: &RoadNetwork,
        at: NodeId,
        destination: NodeId,
        seen: &mut Vec<bool>,
        stack: &mut Vec<EdgeId>,
        out: &mut Vec<Vec<EdgeId>>,
    ) {
        if at == destination {
            out.push(stack.clone());
            return;
        }
        for &e in net.out_edges(at) {
            let next = net.edge(e).dst;
            if seen[next.index()] {
                continue;
            }
            seen[next.index()] = true;
            stack.push(e);
            walk(net, next, destination, seen, stack, out);
            stack.pop();
            seen[next.index()] = false;
        }
    }
    let mut seen = vec![false; net.node_count()];
    seen[source.index()] = true;
    let mut out = Vec::new();
    walk(
        net,
        source,
        destination,
        &mut seen,
        &mut Vec::new(),
        &mut out,
    );
    out
}

/// Earliest arrival over all simple paths.
pub fn exhaustive_best_arrival<V: LoadView>(net: &RoadNetwork, view: &V, q: &Query) -> Option<f64> {
    simple_paths(net, q.source, q.destination)
        .iter()
        .filter_map(|p| sequence_arrival(net, view, q.depart, p))
        .min_by(f64::total_cmp)
}
