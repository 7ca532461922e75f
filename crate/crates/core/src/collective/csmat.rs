use std::collections::HashMap;

use log::{debug, warn};
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::load::{EdgeLoadMatrix, Layered};
use crate::network::RoadNetwork;
use crate::routing::{
    dijkstra_free_flow, evaluate_path_under_elm, tlaa_star, HeuristicCache, Path, Query, QueryId,
    RouteError,
};

use super::batch::{
    define_candidate_set, form_batch, is_free_flow_path_congested, select_minimal_arrival, Pending,
};
use super::{Assignment, PathEdgeMatrix, PenaltyPredictor};

/// How candidates are re-planned between assignments.
///
/// All three modes commit the same paths in the same order; they differ
/// only in how many searches they run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Recompute {
    /// Plan a candidate only when its lower bound could beat the best
    /// up-to-date candidate. Plans survive across candidate sets of a
    /// batch until a committed path touches one of their cells.
    #[default]
    Lazy,
    /// Plan every candidate of a new set; afterwards re-plan only those whose
    /// stored path shares a cell with the newly committed path.
    IntersectingOnly,
    /// Re-plan every candidate after each commit.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchConfig {
    /// Rolling batch horizon in seconds.
    pub window_y_s: f64,
    /// Candidate-set cap; 0 means unlimited.
    pub max_candidates: usize,
    /// Worker threads for candidate evaluation.
    pub parallelism: usize,
    pub recompute: Recompute,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            window_y_s: 14_400.0,
            max_candidates: 0,
            parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
            recompute: Recompute::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CsMatStats {
    pub batches: usize,
    /// Queries assigned their free-flow route without a search.
    pub uncongested: usize,
    pub candidate_sets: usize,
    /// Load-aware searches run.
    pub evaluations: usize,
    /// Assignments of a candidate other than the current base.
    pub reorders: usize,
}

/// Per-query planning state within a batch.
///
/// `bound` never exceeds the query's true earliest arrival under the current
/// load: loads only grow, and arrival is nondecreasing in load. When `fresh`
/// is set the stored plan in the path matrix is exact.
#[derive(Debug, Clone, Copy)]
struct Plan {
    bound: f64,
    fresh: bool,
}

// Slack subtracted from bounds so float noise can never make one optimistic.
const BOUND_SLACK: f64 = 1e-9;

/// Collective assignment.
///
/// Queries are taken in rolling batches of departures within `window_y_s`,
/// sorted by free-flow arrival. The earliest one (the base) keeps its
/// free-flow route if no cell on it has reached capacity. Otherwise every
/// batch query that could arrive before the base's predicted arrival becomes
/// a candidate, candidates are planned under the current load and the
/// earliest arrival among them is committed. This repeats, re-planning
/// candidates whose cells the committed path touched, until the base itself
/// is committed.
pub fn cs_mat(
    net: &RoadNetwork,
    queries: &[Query],
    cfg: &BatchConfig,
    predictor: &dyn PenaltyPredictor,
    background: Option<&EdgeLoadMatrix>,
) -> (Assignment, CsMatStats) {
    let mut elm = EdgeLoadMatrix::for_network(net);
    let horizon = elm.horizon();
    let heuristics = HeuristicCache::new(net);
    let pool = build_pool(cfg.parallelism);
    let chunk = cfg.parallelism.max(1);
    let lazy = cfg.recompute == Recompute::Lazy;
    let mut stats = CsMatStats::default();
    let mut paths = Vec::with_capacity(queries.len());
    let mut failures = Vec::new();

    let mut order: Vec<&Query> = queries.iter().collect();
    order.sort_by(|a, b| a.depart.total_cmp(&b.depart).then(a.id.cmp(&b.id)));
    let mut pending = Vec::with_capacity(order.len());
    for q in order {
        match q
            .validate(net, horizon)
            .and_then(|_| dijkstra_free_flow(net, q))
        {
            Ok(free_flow) => pending.push(Pending {
                query: *q,
                free_flow,
            }),
            Err(e) => failures.push(e),
        }
    }
    let unplanned = |p: &Pending| Plan {
        bound: p.free_flow_arrival() - BOUND_SLACK,
        fresh: false,
    };
    let mut plans: Vec<Plan> = pending.iter().map(unplanned).collect();
    let slot_of: HashMap<QueryId, usize> = pending
        .iter()
        .enumerate()
        .map(|(i, p)| (p.query.id, i))
        .collect();

    let window = net.config().time_to_intervals(cfg.window_y_s);
    let mut assigned = vec![false; pending.len()];
    let mut cursor = 0;
    while cursor < pending.len() {
        if assigned[cursor] {
            cursor += 1;
            continue;
        }
        let mut batch = form_batch(&pending, &assigned, cursor, window);
        stats.batches += 1;
        debug!("batch {} with {} queries", stats.batches, batch.len());

        let mut recheck = false;
        let mut base = usize::MAX;
        let mut candidates: Vec<usize> = Vec::new();
        let mut pem = PathEdgeMatrix::new();

        while !batch.is_empty() {
            if !recheck {
                base = batch[0];
                let phi = &pending[base].free_flow;
                let congested =
                    is_free_flow_path_congested(net, &Layered::new(&elm, background), phi);
                if !congested {
                    let timed = evaluate_path_under_elm(
                        net,
                        &Layered::new(&elm, background),
                        phi.query_id,
                        &phi.edges(),
                        phi.depart,
                    )
                    .map(|mut p| {
                        p.free_flow_cost = phi.free_flow_cost;
                        p
                    });
                    stats.uncongested += 1;
                    assigned[base] = true;
                    batch.retain(|&i| i != base);
                    pem.remove(phi.query_id);
                    match timed {
                        Ok(p) => {
                            invalidate(&pem, &p, &slot_of, &mut plans);
                            commit(&mut elm, p, &mut paths, &mut failures);
                        }
                        Err(e) => failures.push(e),
                    }
                    continue;
                }
                candidates =
                    define_candidate_set(&pending, &batch, base, predictor, cfg.max_candidates);
                stats.candidate_sets += 1;
                if !lazy {
                    pem = PathEdgeMatrix::new();
                    for &i in &candidates {
                        plans[i] = unplanned(&pending[i]);
                    }
                }
            } else if cfg.recompute == Recompute::All {
                for &i in &candidates {
                    plans[i].fresh = false;
                }
            }

            // Plan candidates until the best one is known exactly.
            loop {
                let to_plan: Vec<usize> = if lazy {
                    let best_fresh = candidates
                        .iter()
                        .copied()
                        .filter(|&i| plans[i].fresh)
                        .map(|i| plans[i].bound)
                        .min_by(f64::total_cmp);
                    let mut stale: Vec<usize> = candidates
                        .iter()
                        .copied()
                        .filter(|&i| {
                            !plans[i].fresh && best_fresh.is_none_or(|b| plans[i].bound <= b)
                        })
                        .collect();
                    stale.sort_by(|&a, &b| {
                        plans[a].bound.total_cmp(&plans[b].bound).then(a.cmp(&b))
                    });
                    stale.truncate(chunk);
                    stale
                } else {
                    candidates
                        .iter()
                        .copied()
                        .filter(|&i| !plans[i].fresh)
                        .collect()
                };
                if to_plan.is_empty() {
                    break;
                }
                let results = {
                    let view = Layered::new(&elm, background);
                    let plan = |i: usize| {
                        let q = &pending[i].query;
                        tlaa_star(net, &view, q, heuristics.get(q.destination))
                    };
                    match &pool {
                        Some(pool) => pool
                            .install(|| to_plan.par_iter().map(|&i| plan(i)).collect::<Vec<_>>()),
                        None => to_plan.iter().map(|&i| plan(i)).collect(),
                    }
                };
                stats.evaluations += to_plan.len();
                for (&i, result) in to_plan.iter().zip(results) {
                    match result {
                        Ok(p) => {
                            plans[i] = Plan {
                                bound: p.total_arrival,
                                fresh: true,
                            };
                            pem.insert(p);
                        }
                        Err(e) => {
                            failures.push(e);
                            assigned[i] = true;
                            batch.retain(|&j| j != i);
                            candidates.retain(|&j| j != i);
                            pem.remove(pending[i].query.id);
                        }
                    }
                }
            }
            if assigned[base] {
                recheck = false;
                continue;
            }

            let fresh: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|&i| plans[i].fresh)
                .collect();
            let evaluated: Vec<(&Pending, &Path)> = fresh
                .iter()
                .map(|&i| {
                    (
                        &pending[i],
                        pem.get(pending[i].query.id).expect("fresh plan stored"),
                    )
                })
                .collect();
            let chosen = fresh[select_minimal_arrival(&evaluated).expect("base is a candidate")];
            let path = pem
                .remove(pending[chosen].query.id)
                .expect("fresh plan stored");
            assigned[chosen] = true;
            batch.retain(|&i| i != chosen);
            candidates.retain(|&i| i != chosen);
            recheck = chosen != base;
            if recheck {
                stats.reorders += 1;
            }
            invalidate(&pem, &path, &slot_of, &mut plans);
            commit(&mut elm, path, &mut paths, &mut failures);
        }
    }

    failures.sort_by_key(|e| e.query());
    (
        Assignment {
            paths,
            failures,
            elm,
        },
        stats,
    )
}

/// Marks every stored plan sharing a cell with `committed` as stale.
fn invalidate(
    pem: &PathEdgeMatrix,
    committed: &Path,
    slot_of: &HashMap<QueryId, usize>,
    plans: &mut [Plan],
) {
    for id in pem.intersecting(committed) {
        let stored = pem.get(id).expect("intersecting plan is stored");
        plans[slot_of[&id]] = Plan {
            bound: stored.total_arrival - BOUND_SLACK,
            fresh: false,
        };
    }
}

fn commit(
    elm: &mut EdgeLoadMatrix,
    path: Path,
    paths: &mut Vec<Path>,
    failures: &mut Vec<RouteError>,
) {
    match elm.add_path_load(&path) {
        Ok(()) => paths.push(path),
        Err(_) => failures.push(RouteError::HorizonOverflow(path.query_id)),
    }
}

fn build_pool(parallelism: usize) -> Option<ThreadPool> {
    if parallelism <= 1 {
        return None;
    }
    match rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
    {
        Ok(pool) => Some(pool),
        Err(e) => {
            warn!("falling back to one worker: {e}");
            None
        }
    }
}
