//! Temporal load state: the edge-load matrix and the load-dependent arrival
//! function that turns it into traversal times.

mod arrival;
mod elm;

use thiserror::Error;

use crate::network::EdgeId;

pub use arrival::{arrival_time, delay_exponent, traverse, ArrivalQuery};
pub use elm::{EdgeLoadMatrix, Snapshot};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("edge {edge:?}: interval {interval} is beyond the horizon of {horizon} intervals")]
    HorizonOverflow {
        edge: EdgeId,
        interval: u32,
        horizon: u32,
    },
    #[error("edge {edge:?}: removing load from empty cell at interval {interval}")]
    Underflow { edge: EdgeId, interval: u32 },
    #[error("arrival time {0} is negative")]
    NegativeTime(f64),
    #[error("edge {0:?} is not in the matrix")]
    UnknownEdge(EdgeId),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Read access to per-cell loads.
pub trait LoadView: Sync {
    fn load(&self, edge: EdgeId, interval: u32) -> u32;
    fn horizon(&self) -> u32;
}

impl<V: LoadView + ?Sized> LoadView for &V {
    #[inline]
    fn load(&self, edge: EdgeId, interval: u32) -> u32 {
        (**self).load(edge, interval)
    }

    fn horizon(&self) -> u32 {
        (**self).horizon()
    }
}

/// Controlled load plus an optional fixed background layer.
#[derive(Debug, Clone, Copy)]
pub struct Layered<'a> {
    pub controlled: &'a EdgeLoadMatrix,
    pub background: Option<&'a EdgeLoadMatrix>,
}

impl<'a> Layered<'a> {
    pub fn new(controlled: &'a EdgeLoadMatrix, background: Option<&'a EdgeLoadMatrix>) -> Self {
        Self {
            controlled,
            background,
        }
    }
}

impl LoadView for Layered<'_> {
    #[inline]
    fn load(&self, edge: EdgeId, interval: u32) -> u32 {
        let base = self.controlled.get(edge, interval);
        match self.background {
            Some(bg) => base + bg.get(edge, interval),
            None => base,
        }
    }

    fn horizon(&self) -> u32 {
        self.controlled.horizon()
    }
}

/// Counts the querying vehicle itself in every read.
#[derive(Debug, Clone, Copy)]
pub struct SelfInclusive<V>(pub V);

impl<V: LoadView> LoadView for SelfInclusive<V> {
    #[inline]
    fn load(&self, edge: EdgeId, interval: u32) -> u32 {
        self.0.load(edge, interval) + 1
    }

    fn horizon(&self) -> u32 {
        self.0.horizon()
    }
}
