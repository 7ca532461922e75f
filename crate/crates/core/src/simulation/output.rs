use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::network::RoadNetwork;
use crate::routing::Path;

use super::{ExperimentOutcome, MetricsReport, Timings};

/// Rounds to 9 significant digits.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x + 0.0;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// 9-significant-digit text form used in every output file.
pub fn fmt9(x: f64) -> String {
    sig9(x).to_string()
}

/// Hex SHA-256 of a file's bytes.
pub fn file_sha256(path: impl AsRef<FsPath>) -> io::Result<String> {
    let bytes = fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Parameters that determine a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub interval_s: f64,
    pub headway_s: f64,
    pub psi_factor: f64,
    pub horizon_intervals: u32,
    pub k: usize,
    pub y_s: f64,
    pub gamma: Option<f64>,
    pub base_elm: Option<String>,
    pub predictor: String,
    pub replay: String,
    pub seed: u64,
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunCounts {
    pub queries: usize,
    pub planned: usize,
    pub failed: usize,
    pub completed: usize,
    pub overflowed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub algorithm: String,
    pub network_file: String,
    pub network_sha256: String,
    pub query_file: String,
    pub query_sha256: String,
    pub config: RunConfig,
    pub counts: RunCounts,
    pub wall_times: Timings,
}

impl RunCounts {
    pub fn of(queries: usize, outcome: &ExperimentOutcome) -> Self {
        Self {
            queries,
            planned: outcome.assignment.paths.len(),
            failed: outcome.assignment.failures.len(),
            completed: outcome.replay.paths.len(),
            overflowed: outcome.replay.overflowed.len(),
        }
    }
}

/// Copy of `m` with every float rounded to 9 significant digits.
pub fn rounded_metrics(m: &MetricsReport) -> MetricsReport {
    MetricsReport {
        ajt: sig9(m.ajt),
        ffcu: sig9(m.ffcu),
        ld: sig9(m.ld),
        penalty_mean: sig9(m.penalty_mean),
        penalty_std: sig9(m.penalty_std),
        ..m.clone()
    }
}

fn rounded_timings(t: &Timings) -> Timings {
    Timings {
        plan_s: sig9(t.plan_s),
        replay_s: sig9(t.replay_s),
        metrics_s: sig9(t.metrics_s),
        per_query_runtime_s: sig9(t.per_query_runtime_s),
        end_to_end_avg_min: sig9(t.end_to_end_avg_min),
    }
}

/// `query_id,hop_index,edge_id,entry_time_s,exit_time_s`, one row per hop.
pub fn write_paths_csv(
    net: &RoadNetwork,
    paths: &[Path],
    path: impl AsRef<FsPath>,
) -> io::Result<()> {
    let cfg = net.config();
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "query_id,hop_index,edge_id,entry_time_s,exit_time_s")?;
    for p in paths {
        for (i, hop) in p.hops.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{}",
                p.query_id,
                i,
                net.edge(hop.edge).label,
                fmt9(cfg.intervals_to_time(hop.entry)),
                fmt9(cfg.intervals_to_time(hop.exit)),
            )?;
        }
    }
    w.flush()
}

/// `query_id,pi_minutes`.
pub fn write_penalties_csv(
    net: &RoadNetwork,
    paths: &[Path],
    path: impl AsRef<FsPath>,
) -> io::Result<()> {
    let cfg = net.config();
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "query_id,pi_minutes")?;
    for p in paths {
        writeln!(
            w,
            "{},{}",
            p.query_id,
            fmt9(cfg.intervals_to_minutes(p.penalty()))
        )?;
    }
    w.flush()
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<FsPath>) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()
}

/// Writes `manifest.json`, `paths.csv`, `elm.csv`, `metrics.json` and
/// `penalties.csv` into `dir`, creating it if needed.
///
/// Paths and loads are the replayed ground truth. Wall-clock values go only
/// into the manifest so that `metrics.json` is reproducible byte for byte.
pub fn write_run_dir(
    dir: impl AsRef<FsPath>,
    net: &RoadNetwork,
    outcome: &ExperimentOutcome,
    manifest: &RunManifest,
) -> io::Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut manifest = manifest.clone();
    manifest.wall_times = rounded_timings(&manifest.wall_times);
    write_json(&manifest, dir.join("manifest.json"))?;
    write_paths_csv(net, &outcome.replay.paths, dir.join("paths.csv"))?;
    outcome
        .replay
        .elm
        .write_csv(net, dir.join("elm.csv"))
        .map_err(|e| io::Error::other(e.to_string()))?;
    write_json(&rounded_metrics(&outcome.metrics), dir.join("metrics.json"))?;
    write_penalties_csv(net, &outcome.replay.paths, dir.join("penalties.csv"))
}
