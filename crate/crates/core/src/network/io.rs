//! Network file formats.
//!
//! CSV: an edge file with header `edge_id,src,dst,length_m,speed_mps[,capacity]`
//! and a sibling node file `node_id[,x,y]` (`roads.csv` pairs with
//! `roads.nodes.csv`, `roads.edges.csv` with `roads.nodes.csv`). When the node
//! file is missing the node set is taken from the edge endpoints.
//!
//! JSON: a single document `{nodes: [...], edges: [...], config: {...}}`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{EdgeSpec, NetworkConfig, NetworkError, NodeSpec, RoadNetwork};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: u64,
    pub src: u64,
    pub dst: u64,
    pub length_m: f64,
    pub speed_mps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDocument {
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<NetworkConfig>,
}

/// Loads a network from a CSV edge file (plus node sibling) or a JSON document.
///
/// `cfg` governs derived travel times and capacities; a `config` section in a
/// JSON document is informational only (see [`read_network_document`]).
pub fn load_network(
    path: impl AsRef<Path>,
    cfg: &NetworkConfig,
) -> Result<RoadNetwork, NetworkError> {
    let path = path.as_ref();
    if is_json(path) {
        let doc = read_network_document(path)?;
        let nodes = doc
            .nodes
            .into_iter()
            .enumerate()
            .map(|(i, n)| NodeSpec {
                label: n.id,
                coords: n.x.zip(n.y),
                line: i + 1,
            })
            .collect();
        let edges = doc
            .edges
            .into_iter()
            .enumerate()
            .map(|(i, e)| EdgeSpec {
                label: e.id,
                src: e.src,
                dst: e.dst,
                length_m: e.length_m,
                speed_mps: e.speed_mps,
                capacity: e.capacity,
                line: i + 1,
            })
            .collect();
        return RoadNetwork::from_specs(nodes, edges, *cfg);
    }

    let edges = read_edge_csv(path)?;
    let nodes_path = nodes_sibling(path);
    let nodes = if nodes_path.exists() {
        read_node_csv(&nodes_path)?
    } else {
        log::warn!(
            "no node file at {}; inferring nodes from edge endpoints",
            nodes_path.display()
        );
        let mut labels: Vec<u64> = edges.iter().flat_map(|e| [e.src, e.dst]).collect();
        labels.sort_unstable();
        labels.dedup();
        labels
            .into_iter()
            .map(|label| NodeSpec {
                label,
                coords: None,
                line: 0,
            })
            .collect()
    };
    RoadNetwork::from_specs(nodes, edges, *cfg)
}

pub fn read_network_document(path: impl AsRef<Path>) -> Result<NetworkDocument, NetworkError> {
    let reader = BufReader::new(File::open(path)?);
    Ok(serde_json::from_reader(reader)?)
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Node file paired with an edge file.
pub(crate) fn nodes_sibling(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or_default();
    let stem = name
        .strip_suffix(".edges.csv")
        .or_else(|| name.strip_suffix(".csv"))
        .unwrap_or(name);
    path.with_file_name(format!("{stem}.nodes.csv"))
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>, NetworkError> {
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)?)
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h == name)
}

fn required(headers: &csv::StringRecord, name: &'static str) -> Result<usize, NetworkError> {
    column(headers, name).ok_or_else(|| NetworkError::Parse {
        line: 1,
        message: format!("missing column `{name}`"),
    })
}

fn field<T: std::str::FromStr>(
    record: &csv::StringRecord,
    idx: usize,
    name: &str,
    line: usize,
) -> Result<T, NetworkError> {
    let raw = record.get(idx).ok_or_else(|| NetworkError::Parse {
        line,
        message: format!("missing value for `{name}`"),
    })?;
    raw.parse().map_err(|_| NetworkError::Parse {
        line,
        message: format!("cannot parse `{name}` from {raw:?}"),
    })
}

fn read_edge_csv(path: &Path) -> Result<Vec<EdgeSpec>, NetworkError> {
    let mut rdr = csv_reader(path)?;
    let headers = rdr.headers()?.clone();
    let id = required(&headers, "edge_id")?;
    let src = required(&headers, "src")?;
    let dst = required(&headers, "dst")?;
    let len = required(&headers, "length_m")?;
    let speed = required(&headers, "speed_mps")?;
    let cap = column(&headers, "capacity");

    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let capacity = match cap.and_then(|c| record.get(c)) {
            Some(raw) if !raw.is_empty() => {
                Some(field::<f64>(&record, cap.unwrap(), "capacity", line)?)
            }
            _ => None,
        };
        out.push(EdgeSpec {
            label: field(&record, id, "edge_id", line)?,
            src: field(&record, src, "src", line)?,
            dst: field(&record, dst, "dst", line)?,
            length_m: field(&record, len, "length_m", line)?,
            speed_mps: field(&record, speed, "speed_mps", line)?,
            capacity,
            line,
        });
    }
    Ok(out)
}

fn read_node_csv(path: &Path) -> Result<Vec<NodeSpec>, NetworkError> {
    let mut rdr = csv_reader(path)?;
    let headers = rdr.headers()?.clone();
    let id = required(&headers, "node_id")?;
    let x = column(&headers, "x");
    let y = column(&headers, "y");
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let coords = match (x, y) {
            (Some(xi), Some(yi)) if record.get(xi).is_some_and(|v| !v.is_empty()) => Some((
                field(&record, xi, "x", line)?,
                field(&record, yi, "y", line)?,
            )),
            _ => None,
        };
        out.push(NodeSpec {
            label: field(&record, id, "node_id", line)?,
            coords,
            line,
        });
    }
    Ok(out)
}

/// Writes the edge CSV at `path` and the node CSV next to it.
///
/// Capacities are always written explicitly so a reload reproduces them exactly.
pub fn save_network_csv(net: &RoadNetwork, path: impl AsRef<Path>) -> Result<(), NetworkError> {
    let path = path.as_ref();
    let (nodes, edges) = net.to_specs();

    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "edge_id,src,dst,length_m,speed_mps,capacity")?;
    for e in &edges {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            e.label,
            e.src,
            e.dst,
            e.length_m,
            e.speed_mps,
            e.capacity.expect("to_specs always sets capacity")
        )?;
    }
    w.flush()?;

    let has_coords = nodes.iter().any(|n| n.coords.is_some());
    let mut w = BufWriter::new(File::create(nodes_sibling(path))?);
    if has_coords {
        writeln!(w, "node_id,x,y")?;
    } else {
        writeln!(w, "node_id")?;
    }
    for n in &nodes {
        match (has_coords, n.coords) {
            (true, Some((x, y))) => writeln!(w, "{},{},{}", n.label, x, y)?,
            (true, None) => writeln!(w, "{},,", n.label)?,
            (false, _) => writeln!(w, "{}", n.label)?,
        }
    }
    w.flush()?;
    Ok(())
}

pub fn save_network_json(net: &RoadNetwork, path: impl AsRef<Path>) -> Result<(), NetworkError> {
    let (nodes, edges) = net.to_specs();
    let doc = NetworkDocument {
        nodes: nodes
            .into_iter()
            .map(|n| NodeRecord {
                id: n.label,
                x: n.coords.map(|c| c.0),
                y: n.coords.map(|c| c.1),
            })
            .collect(),
        edges: edges
            .into_iter()
            .map(|e| EdgeRecord {
                id: e.label,
                src: e.src,
                dst: e.dst,
                length_m: e.length_m,
                speed_mps: e.speed_mps,
                capacity: e.capacity,
            })
            .collect(),
        config: Some(*net.config()),
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
