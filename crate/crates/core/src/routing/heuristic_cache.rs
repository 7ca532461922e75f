use std::sync::OnceLock;

use crate::network::{free_flow_heuristic, NodeId, RoadNetwork};

/// Free-flow distances to each destination, computed on first use.
///
/// Safe to share between threads; each destination is computed once.
pub struct HeuristicCache<'n> {
    net: &'n RoadNetwork,
    slots: Vec<OnceLock<Box<[f64]>>>,
}

impl<'n> HeuristicCache<'n> {
    pub fn new(net: &'n RoadNetwork) -> Self {
        Self {
            net,
            slots: (0..net.node_count()).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn network(&self) -> &'n RoadNetwork {
        self.net
    }

    pub fn get(&self, dest: NodeId) -> &[f64] {
        self.slots[dest.index()]
            .get_or_init(|| free_flow_heuristic(self.net, dest).into_boxed_slice())
    }

    /// Number of destinations computed so far.
    pub fn computed(&self) -> usize {
        self.slots.iter().filter(|s| s.get().is_some()).count()
    }
}
