//! Road network model.
//!
//! A [`RoadNetwork`] is an immutable directed graph of intersections and
//! attributed roads. Edge traversal times are stored in interval units and
//! already include the per-road transition penalty; free-flow capacities are
//! kept real-valued.

mod grid;
mod heuristic;
mod io;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use grid::{generate_grid_network, GridSpec};
pub use heuristic::free_flow_heuristic;
pub use io::{
    load_network, read_network_document, save_network_csv, save_network_json, NetworkDocument,
};

/// Dense node index. Indices follow ascending node label order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

/// Dense edge index. Indices follow ascending edge label order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: edge {edge} references unknown node {node}")]
    DanglingEndpoint { line: usize, edge: u64, node: u64 },
    #[error("line {line}: {field} must be positive, got {value}")]
    NonPositive {
        line: usize,
        field: &'static str,
        value: f64,
    },
    #[error("line {line}: duplicate directed edge {src} -> {dst}")]
    DuplicateEdge { line: usize, src: u64, dst: u64 },
    #[error("line {line}: duplicate id {id}")]
    DuplicateId { line: usize, id: u64 },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: u64 },
    #[error("invalid network config: {0}")]
    Config(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("unknown node {0}")]
    UnknownNode(u64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Time discretisation and road-modelling parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NetworkConfig {
    /// Length `I` of one load-tracking interval, seconds.
    pub interval_length_s: f64,
    /// Safe headway between vehicles, seconds.
    pub base_headway_s: f64,
    /// Transition penalty as a fraction of the free-flow traversal time.
    pub transition_penalty_factor: f64,
    /// Number of tracked intervals `T`.
    pub horizon_intervals: u32,
    /// Wall-clock second at which interval 0 starts.
    pub time_origin_s: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            interval_length_s: 360.0,
            base_headway_s: 3.0,
            transition_penalty_factor: 0.5,
            horizon_intervals: 240,
            time_origin_s: 0.0,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<(), NetworkError> {
        if !(self.interval_length_s > 0.0 && self.interval_length_s.is_finite()) {
            return Err(NetworkError::Config(format!(
                "interval_length_s must be > 0, got {}",
                self.interval_length_s
            )));
        }
        if !(self.base_headway_s > 0.0 && self.base_headway_s.is_finite()) {
            return Err(NetworkError::Config(format!(
                "base_headway_s must be > 0, got {}",
                self.base_headway_s
            )));
        }
        if !(self.transition_penalty_factor >= 0.0 && self.transition_penalty_factor.is_finite()) {
            return Err(NetworkError::Config(format!(
                "transition_penalty_factor must be >= 0, got {}",
                self.transition_penalty_factor
            )));
        }
        if self.horizon_intervals < 1 {
            return Err(NetworkError::Config(
                "horizon_intervals must be >= 1".into(),
            ));
        }
        if !self.time_origin_s.is_finite() {
            return Err(NetworkError::Config("time_origin_s must be finite".into()));
        }
        Ok(())
    }

    /// Converts a wall-clock second to interval units.
    pub fn time_to_intervals(&self, seconds: f64) -> f64 {
        (seconds - self.time_origin_s) / self.interval_length_s
    }

    /// Converts interval units back to a wall-clock second.
    pub fn intervals_to_time(&self, t: f64) -> f64 {
        t * self.interval_length_s + self.time_origin_s
    }

    /// Converts a duration in interval units to minutes.
    pub fn intervals_to_minutes(&self, d: f64) -> f64 {
        d * self.interval_length_s / 60.0
    }
}

/// Free-flow capacity `F = δ/(z·η) + I/(η + ψ)` with `ψ = factor·δ/z`.
///
/// Not rounded: load comparisons are made against the real value.
pub fn compute_free_flow_capacity(length_m: f64, speed_mps: f64, cfg: &NetworkConfig) -> f64 {
    let traversal_s = length_m / speed_mps;
    let psi = cfg.transition_penalty_factor * traversal_s;
    traversal_s / cfg.base_headway_s + cfg.interval_length_s / (cfg.base_headway_s + psi)
}

/// Minimum traversal time in interval units, transition penalty included.
pub fn compute_min_travel_time(length_m: f64, speed_mps: f64, cfg: &NetworkConfig) -> f64 {
    let traversal_s = length_m / speed_mps;
    let psi = cfg.transition_penalty_factor * traversal_s;
    (traversal_s + psi) / cfg.interval_length_s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeAttrs {
    pub length_m: f64,
    pub speed_limit_mps: f64,
    /// `Υ`, interval units.
    pub min_travel_time: f64,
    /// `F`, vehicles.
    pub free_flow_capacity: f64,
}

impl EdgeAttrs {
    /// Derives travel time and (unless supplied) capacity from geometry.
    pub fn derive(
        length_m: f64,
        speed_limit_mps: f64,
        capacity: Option<f64>,
        cfg: &NetworkConfig,
    ) -> Result<Self, NetworkError> {
        check_positive(0, "length_m", length_m)?;
        check_positive(0, "speed_mps", speed_limit_mps)?;
        let free_flow_capacity = match capacity {
            Some(c) => {
                check_positive(0, "capacity", c)?;
                c
            }
            None => compute_free_flow_capacity(length_m, speed_limit_mps, cfg),
        };
        let min_travel_time = compute_min_travel_time(length_m, speed_limit_mps, cfg);
        check_positive(0, "min_travel_time", min_travel_time)?;
        Ok(Self {
            length_m,
            speed_limit_mps,
            min_travel_time,
            free_flow_capacity,
        })
    }
}

fn check_positive(line: usize, field: &'static str, value: f64) -> Result<(), NetworkError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(NetworkError::NonPositive { line, field, value })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub label: u64,
    pub src: NodeId,
    pub dst: NodeId,
    pub attrs: EdgeAttrs,
    /// Whether the capacity came from the input rather than the capacity formula.
    pub explicit_capacity: bool,
}

/// Raw edge record prior to validation.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpec {
    pub label: u64,
    pub src: u64,
    pub dst: u64,
    pub length_m: f64,
    pub speed_mps: f64,
    pub capacity: Option<f64>,
    /// Source line for error reporting (0 when not from a file).
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub label: u64,
    pub coords: Option<(f64, f64)>,
    pub line: usize,
}

/// Immutable directed road graph with forward and reverse adjacency.
#[derive(Debug, Clone)]
pub struct RoadNetwork {
    config: NetworkConfig,
    node_labels: Vec<u64>,
    node_coords: Vec<Option<(f64, f64)>>,
    node_index: HashMap<u64, NodeId>,
    edges: Vec<Edge>,
    out_offsets: Vec<u32>,
    out_edges: Vec<EdgeId>,
    in_offsets: Vec<u32>,
    in_edges: Vec<EdgeId>,
    pair_index: HashMap<(NodeId, NodeId), EdgeId>,
}

impl RoadNetwork {
    /// Validates raw specs and builds the network.
    pub fn from_specs(
        nodes: Vec<NodeSpec>,
        edges: Vec<EdgeSpec>,
        cfg: NetworkConfig,
    ) -> Result<Self, NetworkError> {
        cfg.validate()?;

        let mut nodes = nodes;
        nodes.sort_by_key(|n| n.label);
        for pair in nodes.windows(2) {
            if pair[0].label == pair[1].label {
                return Err(NetworkError::DuplicateId {
                    line: pair[1].line,
                    id: pair[1].label,
                });
            }
        }
        let node_labels: Vec<u64> = nodes.iter().map(|n| n.label).collect();
        let node_coords: Vec<Option<(f64, f64)>> = nodes.iter().map(|n| n.coords).collect();
        let node_index: HashMap<u64, NodeId> = node_labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, NodeId(i as u32)))
            .collect();

        let mut edges_in = edges;
        edges_in.sort_by_key(|e| e.label);
        let mut built = Vec::with_capacity(edges_in.len());
        let mut pair_index = HashMap::with_capacity(edges_in.len());
        let mut prev_label: Option<u64> = None;
        for spec in &edges_in {
            if prev_label == Some(spec.label) {
                return Err(NetworkError::DuplicateId {
                    line: spec.line,
                    id: spec.label,
                });
            }
            prev_label = Some(spec.label);
            let lookup = |node: u64| {
                node_index
                    .get(&node)
                    .copied()
                    .ok_or(NetworkError::DanglingEndpoint {
                        line: spec.line,
                        edge: spec.label,
                        node,
                    })
            };
            let src = lookup(spec.src)?;
            let dst = lookup(spec.dst)?;
            if src == dst {
                return Err(NetworkError::SelfLoop {
                    line: spec.line,
                    node: spec.src,
                });
            }
            check_positive(spec.line, "length_m", spec.length_m)?;
            check_positive(spec.line, "speed_mps", spec.speed_mps)?;
            if let Some(c) = spec.capacity {
                check_positive(spec.line, "capacity", c)?;
            }
            let attrs = EdgeAttrs::derive(spec.length_m, spec.speed_mps, spec.capacity, &cfg)
                .map_err(|e| match e {
                    NetworkError::NonPositive { field, value, .. } => NetworkError::NonPositive {
                        line: spec.line,
                        field,
                        value,
                    },
                    other => other,
                })?;
            let id = EdgeId(built.len() as u32);
            if pair_index.insert((src, dst), id).is_some() {
                return Err(NetworkError::DuplicateEdge {
                    line: spec.line,
                    src: spec.src,
                    dst: spec.dst,
                });
            }
            built.push(Edge {
                label: spec.label,
                src,
                dst,
                attrs,
                explicit_capacity: spec.capacity.is_some(),
            });
        }

        let n = node_labels.len();
        let (out_offsets, out_edges) = csr(n, &built, |e| e.src, |e| e.dst);
        let (in_offsets, in_edges) = csr(n, &built, |e| e.dst, |e| e.src);

        Ok(Self {
            config: cfg,
            node_labels,
            node_coords,
            node_index,
            edges: built,
            out_offsets,
            out_edges,
            in_offsets,
            in_edges,
            pair_index,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn node_count(&self) -> usize {
        self.node_labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        (0..self.node_labels.len() as u32).map(NodeId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.index()]
    }

    #[inline]
    pub fn attrs(&self, id: EdgeId) -> &EdgeAttrs {
        &self.edges[id.index()].attrs
    }

    pub fn node_label(&self, id: NodeId) -> u64 {
        self.node_labels[id.index()]
    }

    pub fn node_coords(&self, id: NodeId) -> Option<(f64, f64)> {
        self.node_coords[id.index()]
    }

    pub fn node_by_label(&self, label: u64) -> Option<NodeId> {
        self.node_index.get(&label).copied()
    }

    pub fn edge_between(&self, src: NodeId, dst: NodeId) -> Option<EdgeId> {
        self.pair_index.get(&(src, dst)).copied()
    }

    /// Outgoing edges of `node`, ordered by head node index.
    #[inline]
    pub fn out_edges(&self, node: NodeId) -> &[EdgeId] {
        let i = node.index();
        &self.out_edges[self.out_offsets[i] as usize..self.out_offsets[i + 1] as usize]
    }

    /// Incoming edges of `node`, ordered by tail node index.
    #[inline]
    pub fn in_edges(&self, node: NodeId) -> &[EdgeId] {
        let i = node.index();
        &self.in_edges[self.in_offsets[i] as usize..self.in_offsets[i + 1] as usize]
    }

    /// Looks up an edge by its external label.
    pub fn edge_by_label(&self, label: u64) -> Option<EdgeId> {
        self.edges
            .binary_search_by_key(&label, |e| e.label)
            .ok()
            .map(|i| EdgeId(i as u32))
    }

    /// Rebuilds raw specs, used for serialisation.
    pub fn to_specs(&self) -> (Vec<NodeSpec>, Vec<EdgeSpec>) {
        let nodes = self
            .node_labels
            .iter()
            .zip(&self.node_coords)
            .map(|(&label, &coords)| NodeSpec {
                label,
                coords,
                line: 0,
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| EdgeSpec {
                label: e.label,
                src: self.node_label(e.src),
                dst: self.node_label(e.dst),
                length_m: e.attrs.length_m,
                speed_mps: e.attrs.speed_limit_mps,
                capacity: Some(e.attrs.free_flow_capacity),
                line: 0,
            })
            .collect();
        (nodes, edges)
    }
}

fn csr(
    n: usize,
    edges: &[Edge],
    key: impl Fn(&Edge) -> NodeId,
    other: impl Fn(&Edge) -> NodeId,
) -> (Vec<u32>, Vec<EdgeId>) {
    let mut order: Vec<EdgeId> = (0..edges.len() as u32).map(EdgeId).collect();
    order.sort_by_key(|&id| {
        let e = &edges[id.index()];
        (key(e), other(e), id)
    });
    let mut offsets = vec![0u32; n + 1];
    for e in edges {
        offsets[key(e).index() + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    (offsets, order)
}
