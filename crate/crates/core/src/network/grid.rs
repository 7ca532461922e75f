use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EdgeSpec, NetworkConfig, NetworkError, NodeSpec, RoadNetwork};

/// Synthetic grid parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub rows: u32,
    pub cols: u32,
    pub edge_len_m: f64,
    pub speed_mps: f64,
    /// Relative speed jitter: each directed edge gets `speed · (1 + u)` with
    /// `u` uniform in `[-jitter, jitter]`. Zero disables jitter.
    pub speed_jitter: f64,
}

/// Builds a bidirectional `rows × cols` grid.
///
/// Node label `r·cols + c` sits at `(c·len, r·len)`. Edge labels are assigned
/// in a fixed scan order, so equal inputs give identical networks.
pub fn generate_grid_network(
    spec: &GridSpec,
    cfg: &NetworkConfig,
    seed: u64,
) -> Result<RoadNetwork, NetworkError> {
    if spec.rows < 2 || spec.cols < 2 {
        return Err(NetworkError::Grid(format!(
            "need at least 2x2, got {}x{}",
            spec.rows, spec.cols
        )));
    }
    if !(0.0..1.0).contains(&spec.speed_jitter) {
        return Err(NetworkError::Grid(format!(
            "speed jitter must be in [0, 1), got {}",
            spec.speed_jitter
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let label = |r: u32, c: u32| u64::from(r * spec.cols + c);

    let mut nodes = Vec::with_capacity((spec.rows * spec.cols) as usize);
    for r in 0..spec.rows {
        for c in 0..spec.cols {
            nodes.push(NodeSpec {
                label: label(r, c),
                coords: Some((c as f64 * spec.edge_len_m, r as f64 * spec.edge_len_m)),
                line: 0,
            });
        }
    }

    let mut edges = Vec::new();
    let push = |edges: &mut Vec<EdgeSpec>, src: u64, dst: u64, rng: &mut ChaCha8Rng| {
        let speed = if spec.speed_jitter > 0.0 {
            spec.speed_mps * (1.0 + rng.gen_range(-spec.speed_jitter..=spec.speed_jitter))
        } else {
            spec.speed_mps
        };
        edges.push(EdgeSpec {
            label: edges.len() as u64,
            src,
            dst,
            length_m: spec.edge_len_m,
            speed_mps: speed,
            capacity: None,
            line: 0,
        });
    };
    for r in 0..spec.rows {
        for c in 0..spec.cols {
            if c + 1 < spec.cols {
                push(&mut edges, label(r, c), label(r, c + 1), &mut rng);
                push(&mut edges, label(r, c + 1), label(r, c), &mut rng);
            }
            if r + 1 < spec.rows {
                push(&mut edges, label(r, c), label(r + 1, c), &mut rng);
                push(&mut edges, label(r + 1, c), label(r, c), &mut rng);
            }
        }
    }
    RoadNetwork::from_specs(nodes, edges, *cfg)
}
