use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};

use crate::collective::{
    assign_sequential, cs_mat, warm_up_predictor, Assignment, BatchConfig, CsMatStats,
    PenaltyPredictor, Router, ZeroPredictor,
};
use crate::load::EdgeLoadMatrix;
use crate::network::RoadNetwork;
use crate::routing::{dijkstra_free_flow, Query};

use super::{
    compute_metrics, end_to_end_minutes, replay_assignment, MetricsReport, ReplayMode,
    ReplayResult, Route,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ffnd,
    Slad,
    Tlatk,
    Tlaa,
    Csmat,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Ffnd,
        Algorithm::Slad,
        Algorithm::Tlatk,
        Algorithm::Tlaa,
        Algorithm::Csmat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ffnd => "ffnd",
            Algorithm::Slad => "slad",
            Algorithm::Tlatk => "tlatk",
            Algorithm::Tlaa => "tlaa",
            Algorithm::Csmat => "csmat",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

/// Source of the congestion-penalty estimates used by collective assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictorKind {
    Zero,
    /// Per-pair mean penalty from a chronological load-aware warm-up run.
    #[default]
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    /// Candidate routes for top-k selection.
    pub k: usize,
    pub batch: BatchConfig,
    pub predictor: PredictorKind,
    pub replay: ReplayMode,
}

impl ExperimentConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            k: 5,
            batch: BatchConfig::default(),
            predictor: PredictorKind::default(),
            replay: ReplayMode::default(),
        }
    }
}

/// Wall-clock measurements of a run, in seconds unless noted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub plan_s: f64,
    pub replay_s: f64,
    pub metrics_s: f64,
    pub per_query_runtime_s: f64,
    /// Per-query runtime plus AJT, minutes.
    pub end_to_end_avg_min: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub assignment: Assignment,
    pub replay: ReplayResult,
    pub metrics: MetricsReport,
    pub stats: Option<CsMatStats>,
    pub timings: Timings,
}

/// Plans `queries` with the configured algorithm, replays the routes against
/// the load they create (plus `background`) and computes the metrics.
///
/// All algorithms except collective assignment plan in departure order.
pub fn run_experiment(
    net: &RoadNetwork,
    queries: &[Query],
    cfg: &ExperimentConfig,
    background: Option<&EdgeLoadMatrix>,
) -> ExperimentOutcome {
    let started = Instant::now();
    let mut stats = None;
    let assignment = match cfg.algorithm {
        Algorithm::Ffnd => assign_sequential(net, queries, Router::Ffnd, background),
        Algorithm::Slad => assign_sequential(net, queries, Router::Slad, background),
        Algorithm::Tlatk => assign_sequential(net, queries, Router::TlatK(cfg.k), background),
        Algorithm::Tlaa => assign_sequential(net, queries, Router::Tlaa, background),
        Algorithm::Csmat => {
            let predictor: Box<dyn PenaltyPredictor> = match cfg.predictor {
                PredictorKind::Zero => Box::new(ZeroPredictor),
                PredictorKind::Table => Box::new(warm_up_predictor(net, queries, background)),
            };
            let (a, s) = cs_mat(net, queries, &cfg.batch, predictor.as_ref(), background);
            stats = Some(s);
            a
        }
    };
    let plan_s = started.elapsed().as_secs_f64();
    info!(
        "{}: planned {} paths, {} failures in {:.3}s",
        cfg.algorithm,
        assignment.paths.len(),
        assignment.failures.len(),
        plan_s
    );

    let started = Instant::now();
    let by_id: HashMap<_, _> = queries.iter().map(|q| (q.id, q)).collect();
    let routes: Vec<Route> = assignment
        .paths
        .iter()
        .map(|p| {
            let q = *by_id[&p.query_id];
            let ff = dijkstra_free_flow(net, &q).map_or(p.free_flow_cost, |f| f.free_flow_cost);
            Route::from_path(q, p, ff)
        })
        .collect();
    let replay = replay_assignment(net, &routes, background, cfg.replay);
    let replay_s = started.elapsed().as_secs_f64();

    let started = Instant::now();
    let metrics = compute_metrics(net, &replay, background);
    let metrics_s = started.elapsed().as_secs_f64();

    let per_query_runtime_s = if queries.is_empty() {
        0.0
    } else {
        plan_s / queries.len() as f64
    };
    ExperimentOutcome {
        assignment,
        replay,
        stats,
        timings: Timings {
            plan_s,
            replay_s,
            metrics_s,
            per_query_runtime_s,
            end_to_end_avg_min: end_to_end_minutes(metrics.ajt, per_query_runtime_s),
        },
        metrics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NodeId;
    use crate::routing::fixtures;

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("dijkstra".parse::<Algorithm>().is_err());
    }

    #[test]
    fn deterministic_and_gamma_one_is_neutral() {
        let net = fixtures::diamond();
        let queries: Vec<_> = (0..8)
            .map(|i| Query::new(i, NodeId(0), NodeId(3), 0.1 * (i % 3) as f64))
            .collect();
        for alg in Algorithm::ALL {
            let mut cfg = ExperimentConfig::new(alg);
            cfg.batch.parallelism = 1;
            let a = run_experiment(&net, &queries, &cfg, None);
            let b = run_experiment(&net, &queries, &cfg, None);
            assert_eq!(a.metrics, b.metrics);
            let zero = EdgeLoadMatrix::for_network(&net);
            let c = run_experiment(&net, &queries, &cfg, Some(&zero));
            assert_eq!(a.metrics, c.metrics);
            assert_eq!(a.replay.paths.len(), 8);
        }
    }
}
