use std::cmp::Ordering;

/// Min-heap entry keyed by `(score, node)`; `BinaryHeap` pops the smallest.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MinScored {
    pub score: f64,
    pub node: u32,
}

impl PartialEq for MinScored {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for MinScored {}

impl PartialOrd for MinScored {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MinScored {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .score
            .total_cmp(&self.score)
            .then_with(|| other.node.cmp(&self.node))
    }
}
