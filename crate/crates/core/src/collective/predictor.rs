use std::collections::HashMap;

use crate::network::NodeId;
use crate::routing::Query;

/// Estimate of a query's congestion penalty, in interval units.
pub trait PenaltyPredictor: Send + Sync {
    fn predict(&self, q: &Query) -> f64;
}

/// Always predicts no congestion.
#[derive(Debug, Default, Clone, Copy)]
pub struct ZeroPredictor;

impl PenaltyPredictor for ZeroPredictor {
    fn predict(&self, _q: &Query) -> f64 {
        0.0
    }
}

/// Mean observed penalty per `(source, destination)` pair, falling back to
/// the mean over all observations, then to zero.
#[derive(Debug, Default, Clone)]
pub struct TablePredictor {
    pairs: HashMap<(NodeId, NodeId), (f64, u32)>,
    global: Option<f64>,
}

impl TablePredictor {
    pub fn train<'a>(rows: impl IntoIterator<Item = (&'a Query, f64)>) -> Self {
        let mut pairs: HashMap<(NodeId, NodeId), (f64, u32)> = HashMap::new();
        let (mut sum, mut count) = (0.0, 0u64);
        for (q, pi) in rows {
            let pi = pi.max(0.0);
            let slot = pairs.entry((q.source, q.destination)).or_default();
            slot.0 += pi;
            slot.1 += 1;
            sum += pi;
            count += 1;
        }
        Self {
            pairs,
            global: (count > 0).then(|| sum / count as f64),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

impl PenaltyPredictor for TablePredictor {
    fn predict(&self, q: &Query) -> f64 {
        match self.pairs.get(&(q.source, q.destination)) {
            Some(&(sum, n)) => sum / f64::from(n),
            None => self.global.unwrap_or(0.0),
        }
    }
}
