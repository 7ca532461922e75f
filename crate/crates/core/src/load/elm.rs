use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::network::{EdgeId, RoadNetwork};
use crate::routing::Path as RoutePath;
use crate::time::interval_of;

use super::{LoadError, LoadView};

/// Expected vehicle count per `(edge, interval)`.
///
/// Storage is a dense row per edge (`edges × horizon` counters). Absent
/// entries read as zero; the CSV export lists only non-zero cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeLoadMatrix {
    horizon: u32,
    edges: usize,
    cells: Vec<u32>,
}

impl EdgeLoadMatrix {
    pub fn new(edge_count: usize, horizon: u32) -> Self {
        Self {
            horizon,
            edges: edge_count,
            cells: vec![0; edge_count * horizon as usize],
        }
    }

    /// Empty matrix shaped for `net`.
    pub fn for_network(net: &RoadNetwork) -> Self {
        Self::new(net.edge_count(), net.config().horizon_intervals)
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline]
    fn slot(&self, edge: EdgeId, interval: u32) -> usize {
        edge.index() * self.horizon as usize + interval as usize
    }

    #[inline]
    pub fn get(&self, edge: EdgeId, interval: u32) -> u32 {
        if interval >= self.horizon || edge.index() >= self.edges {
            return 0;
        }
        self.cells[self.slot(edge, interval)]
    }

    pub fn set(&mut self, edge: EdgeId, interval: u32, load: u32) -> Result<(), LoadError> {
        self.check_cell(edge, interval)?;
        let slot = self.slot(edge, interval);
        self.cells[slot] = load;
        Ok(())
    }

    fn check_cell(&self, edge: EdgeId, interval: u32) -> Result<(), LoadError> {
        if interval >= self.horizon {
            return Err(LoadError::HorizonOverflow {
                edge,
                interval,
                horizon: self.horizon,
            });
        }
        if edge.index() >= self.edges {
            return Err(LoadError::UnknownEdge(edge));
        }
        Ok(())
    }

    /// Interval range a traversal `[entry, exit]` occupies.
    pub fn span(entry: f64, exit: f64) -> std::ops::RangeInclusive<u32> {
        interval_of(entry)..=interval_of(exit)
    }

    /// Adds one vehicle on `edge` for every interval touched by `[entry, exit]`.
    pub fn add_occupancy(&mut self, edge: EdgeId, entry: f64, exit: f64) -> Result<(), LoadError> {
        let span = Self::span(entry, exit);
        self.check_cell(edge, *span.end())?;
        for interval in span {
            let slot = self.slot(edge, interval);
            self.cells[slot] += 1;
        }
        Ok(())
    }

    fn remove_occupancy_unchecked(&mut self, edge: EdgeId, entry: f64, exit: f64) {
        for interval in Self::span(entry, exit) {
            let slot = self.slot(edge, interval);
            self.cells[slot] -= 1;
        }
    }

    /// Records a vehicle's occupancy for every hop of `path`.
    ///
    /// Validates every cell before touching any, so a failed call leaves the
    /// matrix unchanged.
    pub fn add_path_load(&mut self, path: &RoutePath) -> Result<(), LoadError> {
        for hop in &path.hops {
            self.check_cell(hop.edge, interval_of(hop.exit))?;
        }
        for hop in &path.hops {
            for interval in Self::span(hop.entry, hop.exit) {
                let slot = self.slot(hop.edge, interval);
                self.cells[slot] += 1;
            }
        }
        Ok(())
    }

    /// Exact inverse of [`add_path_load`](Self::add_path_load).
    pub fn remove_path_load(&mut self, path: &RoutePath) -> Result<(), LoadError> {
        // A path may cross the same cell only once per hop, but two hops can
        // share an edge only if the route repeats it, which valid paths never do.
        for hop in &path.hops {
            self.check_cell(hop.edge, interval_of(hop.exit))?;
            for interval in Self::span(hop.entry, hop.exit) {
                if self.cells[self.slot(hop.edge, interval)] == 0 {
                    return Err(LoadError::Underflow {
                        edge: hop.edge,
                        interval,
                    });
                }
            }
        }
        for hop in &path.hops {
            self.remove_occupancy_unchecked(hop.edge, hop.entry, hop.exit);
        }
        Ok(())
    }

    /// Cell-wise sum with another matrix of the same shape.
    pub fn add_matrix(&mut self, other: &EdgeLoadMatrix) {
        assert_eq!(self.cells.len(), other.cells.len(), "shape mismatch");
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            *a += b;
        }
    }

    /// Sum of all cells.
    pub fn total_mass(&self) -> u64 {
        self.cells.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(|&c| c == 0)
    }

    /// Non-zero cells in `(edge, interval)` order.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (EdgeId, u32, u32)> + '_ {
        let horizon = self.horizon as usize;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(i, &c)| (EdgeId((i / horizon) as u32), (i % horizon) as u32, c))
    }

    /// Read-only view freezing every interval at the loads of `interval`.
    pub fn snapshot_at(&self, interval: u32) -> Snapshot<&Self> {
        Snapshot::new(self, interval)
    }

    /// Writes `edge_id,interval,load` rows for non-zero cells, using edge labels.
    pub fn write_csv(&self, net: &RoadNetwork, path: impl AsRef<Path>) -> Result<(), LoadError> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "edge_id,interval,load")?;
        for (edge, interval, load) in self.iter_nonzero() {
            writeln!(w, "{},{},{}", net.edge(edge).label, interval, load)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a sparse `edge_id,interval,load` CSV against `net`.
    pub fn read_csv(net: &RoadNetwork, path: impl AsRef<Path>) -> Result<Self, LoadError> {
        let mut elm = Self::for_network(net);
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)?;
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let parse = |i: usize| -> Result<u64, LoadError> {
                record
                    .get(i)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| LoadError::Parse {
                        line,
                        message: format!("bad or missing column {i}"),
                    })
            };
            let label = parse(0)?;
            let edge = net.edge_by_label(label).ok_or_else(|| LoadError::Parse {
                line,
                message: format!("unknown edge {label}"),
            })?;
            let interval = u32::try_from(parse(1)?).map_err(|_| LoadError::Parse {
                line,
                message: "interval out of range".into(),
            })?;
            let load = u32::try_from(parse(2)?).map_err(|_| LoadError::Parse {
                line,
                message: "load out of range".into(),
            })?;
            elm.set(edge, interval, load)?;
        }
        Ok(elm)
    }
}

impl LoadView for EdgeLoadMatrix {
    #[inline]
    fn load(&self, edge: EdgeId, interval: u32) -> u32 {
        self.get(edge, interval)
    }

    fn horizon(&self) -> u32 {
        self.horizon
    }
}

/// Time-constant view: every read returns the load recorded at one interval.
#[derive(Debug, Clone, Copy)]
pub struct Snapshot<V> {
    inner: V,
    interval: u32,
}

impl<V: LoadView> Snapshot<V> {
    pub fn new(inner: V, interval: u32) -> Self {
        Self { inner, interval }
    }

    pub fn interval(&self) -> u32 {
        self.interval
    }
}

impl<V: LoadView> LoadView for Snapshot<V> {
    #[inline]
    fn load(&self, edge: EdgeId, _interval: u32) -> u32 {
        self.inner.load(edge, self.interval)
    }

    fn horizon(&self) -> u32 {
        self.inner.horizon()
    }
}
