//! Routing and batch simulation on temporal load-aware road networks.
//!
//! Edge traversal times depend on how many vehicles are expected on the edge
//! in each discrete time interval. The crate provides the network model, the
//! edge-load matrix and arrival function, single-query routers, a collective
//! batch assigner, a replay simulator and the evaluation metrics.

// `!(a < b)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod heap;

pub mod collective;
pub mod load;
pub mod network;
pub mod routing;
pub mod simulation;
pub mod time;
pub mod workload;

pub use load::{EdgeLoadMatrix, LoadView};
pub use network::{EdgeAttrs, EdgeId, NetworkConfig, NodeId, RoadNetwork};
pub use routing::{Hop, Path, Query, QueryId, RouteError};
