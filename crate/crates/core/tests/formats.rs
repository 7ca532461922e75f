mod common;

use std::fs;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tlan_core::network::{
    generate_grid_network, load_network, save_network_csv, save_network_json, GridSpec,
};
use tlan_core::workload::{
    generate_queries, load_queries, precompute_free_flow, save_queries, QueryGenSpec, WorkloadError,
};
use tlan_core::{EdgeLoadMatrix, NetworkConfig, RoadNetwork};

use common::*;

fn grid(seed: u64) -> RoadNetwork {
    let spec = GridSpec {
        rows: 5,
        cols: 5,
        edge_len_m: 250.0,
        speed_mps: 13.9,
        speed_jitter: 0.25,
    };
    generate_grid_network(&spec, &NetworkConfig::default(), seed).unwrap()
}

fn same_network(a: &RoadNetwork, b: &RoadNetwork) {
    assert_eq!(a.node_count(), b.node_count());
    assert_eq!(a.edge_count(), b.edge_count());
    // Saved capacities come back as explicit values; everything else must match.
    for (x, y) in a.edges().iter().zip(b.edges()) {
        assert_eq!(
            (x.label, x.src, x.dst, x.attrs),
            (y.label, y.src, y.dst, y.attrs)
        );
    }
    for n in a.nodes() {
        assert_eq!(a.node_label(n), b.node_label(n));
        assert_eq!(a.node_coords(n), b.node_coords(n));
    }
}

#[test]
fn network_round_trips_through_csv_and_json() {
    let net = grid(11);
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.edges.csv");
    let json = dir.path().join("g.json");
    save_network_csv(&net, &csv).unwrap();
    save_network_json(&net, &json).unwrap();
    same_network(&net, &load_network(&csv, net.config()).unwrap());
    same_network(&net, &load_network(&json, net.config()).unwrap());
}

#[test]
fn fixture_network_loads_with_explicit_capacities() {
    let (net, qs) = fig1();
    assert_eq!(net.node_count(), 6);
    assert_eq!(net.edge_count(), 7);
    assert!(net
        .edges()
        .iter()
        .all(|e| e.explicit_capacity && e.attrs.free_flow_capacity == 4.0));
    assert_eq!(qs.len(), 6);
    let corridor = route(&net, &[1, 2, 3, 4]);
    assert!((tlan_core::routing::free_flow_cost(&net, &corridor) - 0.3).abs() < 1e-12);
    for detour in [[1, 5, 3, 4], [1, 2, 6, 4]] {
        let cost = tlan_core::routing::free_flow_cost(&net, &route(&net, &detour));
        assert!((cost - 0.4).abs() < 1e-12);
    }
}

#[test]
fn queries_round_trip_exactly() {
    let net = grid(3);
    let spec = QueryGenSpec {
        count: 500,
        window_s: (25_200.0, 39_600.0),
        hotspot_bias: 0.4,
        hotspot_size: 3,
    };
    let qs = generate_queries(&net, &spec, 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.csv");
    save_queries(&net, &qs, &path, Some(&spec.describe(3))).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# seed=3 count=500"));
    let back = load_queries(&path, &net).unwrap();
    assert_eq!(back, qs);

    // Writing the reloaded set gives the same bytes.
    let again = dir.path().join("q2.csv");
    save_queries(&net, &back, &again, Some(&spec.describe(3))).unwrap();
    assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn generation_is_deterministic_per_seed() {
    let net = grid(5);
    let spec = QueryGenSpec {
        count: 300,
        window_s: (0.0, 3600.0),
        hotspot_bias: 0.5,
        hotspot_size: 4,
    };
    let a = generate_queries(&net, &spec, 9).unwrap();
    assert_eq!(a, generate_queries(&net, &spec, 9).unwrap());
    assert_ne!(a, generate_queries(&net, &spec, 10).unwrap());
    let q = generate_queries(&net, &QueryGenSpec { count: 1, ..spec }, 9).unwrap();
    assert_eq!(q.len(), 1);
    assert!((0.0..10.0).contains(&q.queries()[0].depart));
}

#[test]
fn unbiased_endpoints_pass_a_chi_square_uniformity_check() {
    let net = grid(2);
    let spec = QueryGenSpec {
        count: 10_000,
        window_s: (0.0, 3600.0),
        hotspot_bias: 0.0,
        hotspot_size: 1,
    };
    let qs = generate_queries(&net, &spec, 2).unwrap();
    let n = net.node_count();
    let mut sources = vec![0u32; n];
    let mut dests = vec![0u32; n];
    for q in qs.queries() {
        sources[q.source.index()] += 1;
        dests[q.destination.index()] += 1;
    }
    // Critical value of chi-square with 24 degrees of freedom at 5%.
    const CRITICAL: f64 = 36.415;
    let expected = spec.count as f64 / n as f64;
    for counts in [&sources, &dests] {
        let stat: f64 = counts
            .iter()
            .map(|&c| (f64::from(c) - expected).powi(2) / expected)
            .sum();
        assert!(stat < CRITICAL, "chi-square {stat} over {counts:?}");
    }
}

#[test]
fn hotspot_bias_concentrates_endpoints() {
    let net = grid(2);
    let spec = QueryGenSpec {
        count: 2000,
        window_s: (0.0, 600.0),
        hotspot_bias: 1.0,
        hotspot_size: 1,
    };
    let qs = generate_queries(&net, &spec, 4).unwrap();
    let centre = net.node_by_label(12).unwrap();
    assert!(qs
        .queries()
        .iter()
        .all(|q| q.source == centre || q.destination == centre));
}

#[test]
fn precompute_flags_unreachable_and_is_idempotent() {
    let (net, _) = fig1();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.csv");
    fs::write(
        &path,
        "query_id,src,dst,depart_s\n1,1,4,0\n2,4,1,30\n3,2,6,10\n",
    )
    .unwrap();
    let qs = load_queries(&path, &net).unwrap();
    let pre = precompute_free_flow(&net, &qs);
    assert!(pre.is_precomputed());
    assert_eq!(pre.unreachable(), vec![tlan_core::QueryId(2)]);
    assert_eq!(pre.reachable().len(), 2);
    assert!((pre.free_flow(0).unwrap().free_flow_cost - 0.3).abs() < 1e-12);
    assert_eq!(precompute_free_flow(&net, &pre), pre);
}

#[test]
fn bad_query_rows_are_rejected_with_their_line() {
    let (net, _) = fig1();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.csv");
    fs::write(&path, "query_id,src,dst,depart_s\n1,1,4,0\n2,3,3,0\n").unwrap();
    match load_queries(&path, &net) {
        Err(WorkloadError::SameEndpoints { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected same-endpoint rejection, got {other:?}"),
    }
}

#[test]
fn load_matrix_round_trips_through_csv() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let net = random_network(&mut rng, 12);
    let elm = random_elm(&net, &mut rng, 9);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("elm.csv");
    elm.write_csv(&net, &path).unwrap();
    assert_eq!(EdgeLoadMatrix::read_csv(&net, &path).unwrap(), elm);
}
