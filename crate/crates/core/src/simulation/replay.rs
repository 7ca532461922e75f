use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::load::{traverse, EdgeLoadMatrix, Layered, LoadView};
use crate::network::{EdgeId, RoadNetwork};
use crate::routing::{Hop, Path, Query, QueryId};
use crate::time::interval_of;

/// A fixed route to be driven from the query's departure.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub query: Query,
    pub edges: Vec<EdgeId>,
    /// The query's free-flow optimum `|φ|`, carried through to the result.
    pub free_flow_cost: f64,
}

impl Route {
    pub fn from_path(query: Query, path: &Path, free_flow_cost: f64) -> Self {
        Self {
            query,
            edges: path.edges(),
            free_flow_cost,
        }
    }
}

/// Order in which vehicles claim road space during replay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReplayMode {
    /// Global event loop: the vehicle with the earliest pending edge entry
    /// moves next (ties by query id).
    #[default]
    EventDriven,
    /// Vehicles drive their whole route one after another in input order.
    InOrder,
}

#[derive(Debug, Clone)]
pub struct ReplayResult {
    /// Re-timed paths, sorted by query id.
    pub paths: Vec<Path>,
    /// Ground-truth load of the replayed vehicles (background excluded).
    pub elm: EdgeLoadMatrix,
    /// Vehicles dropped because they ran past the horizon.
    pub overflowed: Vec<QueryId>,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    query: QueryId,
    slot: usize,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.query.cmp(&self.query))
            .then_with(|| other.slot.cmp(&self.slot))
    }
}

struct Vehicle<'r> {
    route: &'r Route,
    hops: Vec<Hop>,
}

/// Drives every route against the load the replayed vehicles actually create.
///
/// Each edge exit comes from the arrival function using the ground-truth
/// load (plus `background`) of the entry interval at the moment the vehicle
/// enters; the vehicle's occupancy is then added for every spanned interval.
pub fn replay_assignment(
    net: &RoadNetwork,
    routes: &[Route],
    background: Option<&EdgeLoadMatrix>,
    mode: ReplayMode,
) -> ReplayResult {
    let mut truth = EdgeLoadMatrix::for_network(net);
    let horizon = truth.horizon();
    let mut vehicles: Vec<Vehicle> = routes
        .iter()
        .map(|route| Vehicle {
            route,
            hops: Vec::with_capacity(route.edges.len()),
        })
        .collect();
    let mut overflowed = Vec::new();
    let mut dropped = vec![false; routes.len()];

    // Moves a vehicle across its next edge and returns the exit time.
    let step = |truth: &mut EdgeLoadMatrix, v: &mut Vehicle, entry: f64| -> Option<f64> {
        let edge = v.route.edges[v.hops.len()];
        let tau = interval_of(entry);
        if tau >= horizon {
            return None;
        }
        let load = Layered::new(truth, background).load(edge, tau);
        let exit = traverse(entry, f64::from(load), net.attrs(edge));
        if interval_of(exit) >= horizon {
            return None;
        }
        truth
            .add_occupancy(edge, entry, exit)
            .expect("span checked against the horizon");
        v.hops.push(Hop { edge, entry, exit });
        Some(exit)
    };

    match mode {
        ReplayMode::EventDriven => {
            let mut events: BinaryHeap<Event> = vehicles
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.route.edges.is_empty())
                .map(|(slot, v)| Event {
                    time: v.route.query.depart,
                    query: v.route.query.id,
                    slot,
                })
                .collect();
            while let Some(ev) = events.pop() {
                let v = &mut vehicles[ev.slot];
                match step(&mut truth, v, ev.time) {
                    Some(exit) if v.hops.len() < v.route.edges.len() => {
                        events.push(Event { time: exit, ..ev })
                    }
                    Some(_) => {}
                    None => dropped[ev.slot] = true,
                }
            }
        }
        ReplayMode::InOrder => {
            for (slot, v) in vehicles.iter_mut().enumerate() {
                let mut t = v.route.query.depart;
                while v.hops.len() < v.route.edges.len() {
                    match step(&mut truth, v, t) {
                        Some(exit) => t = exit,
                        None => {
                            dropped[slot] = true;
                            break;
                        }
                    }
                }
            }
        }
    }

    let mut paths = Vec::with_capacity(vehicles.len());
    for (slot, v) in vehicles.into_iter().enumerate() {
        let q = v.route.query;
        if dropped[slot] {
            // Keep the partial occupancy: the vehicle was on the road until the horizon.
            overflowed.push(q.id);
            continue;
        }
        let total_arrival = v.hops.last().map_or(q.depart, |h| h.exit);
        paths.push(Path {
            query_id: q.id,
            depart: q.depart,
            hops: v.hops,
            total_arrival,
            free_flow_cost: v.route.free_flow_cost,
        });
    }
    paths.sort_by_key(|p| p.query_id);
    overflowed.sort();
    ReplayResult {
        paths,
        elm: truth,
        overflowed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NodeId;
    use crate::routing::{evaluate_path_under_elm, fixtures};

    fn route(id: u64, depart: f64, edges: &[u32]) -> Route {
        Route {
            query: Query::new(id, NodeId(0), NodeId(3), depart),
            edges: edges.iter().map(|&e| EdgeId(e)).collect(),
            free_flow_cost: 0.2,
        }
    }

    #[test]
    fn single_vehicle_matches_evaluation() {
        let net = fixtures::diamond();
        let r = route(1, 0.95, &[0, 1]);
        let out = replay_assignment(
            &net,
            std::slice::from_ref(&r),
            None,
            ReplayMode::EventDriven,
        );
        let empty = EdgeLoadMatrix::for_network(&net);
        let expected = evaluate_path_under_elm(&net, &empty, QueryId(1), &r.edges, 0.95).unwrap();
        assert_eq!(out.paths[0].hops, expected.hops);
        assert_eq!(out.elm.total_mass(), 3);
    }

    #[test]
    fn earlier_entries_go_first() {
        // Capacity 1 on s→m: with four vehicles the last to enter sees load 3.
        let net = fixtures::net(4, &[(0, 1, 0.1, 1.0), (1, 3, 0.1, 5.0)], 20);
        let routes: Vec<_> = (0..4)
            .map(|i| route(10 - i, 0.5 + 0.01 * i as f64, &[0, 1]))
            .collect();
        let out = replay_assignment(&net, &routes, None, ReplayMode::EventDriven);
        let last = out.paths.iter().find(|p| p.query_id == QueryId(7)).unwrap();
        let first_exit = 0.53f64.powf(0.5);
        assert!((last.hops[0].exit - first_exit - 0.1).abs() < 1e-9);
        for p in &out.paths {
            if p.query_id != QueryId(7) {
                assert!((p.duration() - 0.2).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn in_order_replay_follows_input_order() {
        let net = fixtures::net(4, &[(0, 1, 0.1, 1.0), (1, 3, 0.1, 5.0)], 20);
        // Later departure listed first: it claims the road first.
        let routes: Vec<_> = (0..4)
            .map(|i| route(i, 0.53 - 0.01 * i as f64, &[0, 1]))
            .collect();
        let out = replay_assignment(&net, &routes, None, ReplayMode::InOrder);
        let last = out.paths.iter().find(|p| p.query_id == QueryId(3)).unwrap();
        assert!(last.duration() > 0.2 + 1e-6);
    }

    #[test]
    fn overflow_is_recorded() {
        let net = fixtures::diamond();
        let out = replay_assignment(
            &net,
            &[route(1, 19.9, &[0, 1]), route(2, 0.0, &[0, 1])],
            None,
            ReplayMode::EventDriven,
        );
        assert_eq!(out.overflowed, vec![QueryId(1)]);
        assert_eq!(out.paths.len(), 1);
    }

    #[test]
    fn background_slows_vehicles() {
        let net = fixtures::diamond();
        let mut bg = EdgeLoadMatrix::for_network(&net);
        bg.set(EdgeId(0), 0, 11).unwrap();
        let out = replay_assignment(
            &net,
            &[route(1, 0.1, &[0, 1])],
            Some(&bg),
            ReplayMode::EventDriven,
        );
        assert!((out.paths[0].total_arrival - (0.1f64.powf(1.0 / 6.0) + 0.2)).abs() < 1e-9);
        assert_eq!(out.elm.get(EdgeId(0), 0), 1);
    }
}
