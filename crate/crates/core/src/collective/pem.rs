use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::network::EdgeId;
use crate::routing::{Path, QueryId};

/// Candidate paths indexed by the `(edge, interval)` cells they occupy.
#[derive(Debug, Default, Clone)]
pub struct PathEdgeMatrix {
    paths: BTreeMap<QueryId, Path>,
    cells: HashMap<(EdgeId, u32), BTreeSet<QueryId>>,
}

impl PathEdgeMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn get(&self, id: QueryId) -> Option<&Path> {
        self.paths.get(&id)
    }

    pub fn contains(&self, id: QueryId) -> bool {
        self.paths.contains_key(&id)
    }

    /// Stores `path` for its query, replacing any previous one.
    pub fn insert(&mut self, path: Path) {
        let id = path.query_id;
        self.remove(id);
        for cell in path.cells() {
            self.cells.entry(cell).or_default().insert(id);
        }
        self.paths.insert(id, path);
    }

    pub fn remove(&mut self, id: QueryId) -> Option<Path> {
        let old = self.paths.remove(&id)?;
        for cell in old.cells() {
            if let Some(set) = self.cells.get_mut(&cell) {
                set.remove(&id);
                if set.is_empty() {
                    self.cells.remove(&cell);
                }
            }
        }
        Some(old)
    }

    /// Stored queries sharing at least one cell with `path`.
    pub fn intersecting(&self, path: &Path) -> BTreeSet<QueryId> {
        let mut out = BTreeSet::new();
        for cell in path.cells() {
            if let Some(set) = self.cells.get(&cell) {
                out.extend(set.iter().copied());
            }
        }
        out
    }

    /// Queries recorded under one cell.
    pub fn at(&self, edge: EdgeId, interval: u32) -> impl Iterator<Item = QueryId> + '_ {
        self.cells
            .get(&(edge, interval))
            .into_iter()
            .flat_map(|s| s.iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&QueryId, &Path)> {
        self.paths.iter()
    }
}
