use std::fmt;
use std::fs::File;
use std::io::{self, BufReader};
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use log::info;

use tlan_core::collective::{assign_sequential, Router};
use tlan_core::network::{
    generate_grid_network, load_network, save_network_csv, save_network_json, GridSpec,
};
use tlan_core::simulation::{
    apply_control_factor, file_sha256, fmt9, run_experiment, write_run_dir, ExperimentConfig,
    MetricsReport, RunConfig, RunCounts, RunManifest,
};
use tlan_core::workload::{generate_queries, load_queries, save_queries, QueryGenSpec};
use tlan_core::{EdgeLoadMatrix, NetworkConfig, RoadNetwork};

use crate::args::{
    BaseElmArgs, Compare, Generate, GenerateKind, GridArgs, ModelArgs, QueryArgs, Route,
};

/// Bad command-line input that clap's own checks cannot see. Exits with 2.
#[derive(Debug)]
pub struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn open_network(path: &Path, model: &ModelArgs) -> Result<RoadNetwork> {
    load_network(path, &model.config())
        .with_context(|| format!("loading network {}", path.display()))
}

pub fn generate(g: Generate) -> Result<()> {
    match g.kind {
        GenerateKind::Network(a) => generate_network(a),
        GenerateKind::Queries(a) => generate_query_set(a),
        GenerateKind::BaseElm(a) => generate_base_elm(a),
    }
}

fn generate_network(a: GridArgs) -> Result<()> {
    let spec = GridSpec {
        rows: a.rows,
        cols: a.cols,
        edge_len_m: a.edge_len_m,
        speed_mps: a.speed_mps,
        speed_jitter: a.jitter,
    };
    // Geometry only; the capacity model is applied when the file is loaded.
    let net = generate_grid_network(&spec, &NetworkConfig::default(), a.seed)
        .map_err(|e| usage(e.to_string()))?;
    if is_json(&a.out) {
        save_network_json(&net, &a.out)?;
    } else {
        save_network_csv(&net, &a.out)?;
    }
    println!(
        "network: {} nodes, {} edges -> {}",
        net.node_count(),
        net.edge_count(),
        a.out.display()
    );
    Ok(())
}

fn generate_query_set(a: QueryArgs) -> Result<()> {
    let cfg = a.model.config();
    let (start, end) = (a.window_start_s, a.window_end_s);
    if !(start < end) {
        return Err(usage(format!("empty departure window {start}..{end}")));
    }
    let horizon_end = cfg.time_origin_s + f64::from(cfg.horizon_intervals) * cfg.interval_length_s;
    if start < cfg.time_origin_s || end > horizon_end {
        return Err(usage(format!(
            "departure window {start}..{end} s lies outside the horizon {}..{horizon_end} s",
            cfg.time_origin_s
        )));
    }
    let net = open_network(&a.network, &a.model)?;
    let spec = QueryGenSpec {
        count: a.count as usize,
        window_s: (start, end),
        hotspot_bias: a.hotspot_bias,
        hotspot_size: a.hotspot_size as usize,
    };
    let qs = generate_queries(&net, &spec, a.seed).map_err(|e| usage(e.to_string()))?;
    save_queries(&net, &qs, &a.out, Some(&spec.describe(a.seed)))?;
    println!("queries: {} -> {}", qs.len(), a.out.display());
    Ok(())
}

fn generate_base_elm(a: BaseElmArgs) -> Result<()> {
    let net = open_network(&a.network, &a.model)?;
    let qs = load_queries(&a.queries, &net)
        .with_context(|| format!("loading queries {}", a.queries.display()))?;
    let run = assign_sequential(&net, qs.queries(), Router::Tlaa, None);
    run.elm.write_csv(&net, &a.out)?;
    println!(
        "base load: {} routed, {} failed, {} loaded cells -> {}",
        run.paths.len(),
        run.failures.len(),
        run.elm.iter_nonzero().count(),
        a.out.display()
    );
    Ok(())
}

fn value_name(v: &impl ValueEnum) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default()
}

pub fn route(r: Route) -> Result<()> {
    let net = open_network(&r.network, &r.model)?;
    let qs = load_queries(&r.queries, &net)
        .with_context(|| format!("loading queries {}", r.queries.display()))?;
    let background = match (&r.base_elm, r.gamma) {
        (Some(path), Some(gamma)) => {
            let base = EdgeLoadMatrix::read_csv(&net, path)
                .with_context(|| format!("loading base load {}", path.display()))?;
            let bg = apply_control_factor(&base, gamma);
            info!(
                "background: {} vehicle-cells from {}",
                bg.total_mass(),
                path.display()
            );
            Some(bg)
        }
        _ => None,
    };
    let workers = r.workers.map_or_else(
        || std::thread::available_parallelism().map_or(1, |n| n.get()),
        |w| w as usize,
    );

    let mut cfg = ExperimentConfig::new(r.alg.into());
    cfg.k = r.k as usize;
    cfg.batch.window_y_s = r.y_s;
    cfg.batch.max_candidates = r.max_candidates;
    cfg.batch.parallelism = workers;
    cfg.predictor = r.predictor.into();
    cfg.replay = r.replay.into();

    let outcome = run_experiment(&net, qs.queries(), &cfg, background.as_ref());
    let manifest = RunManifest {
        algorithm: cfg.algorithm.to_string(),
        network_file: r.network.display().to_string(),
        network_sha256: file_sha256(&r.network)?,
        query_file: r.queries.display().to_string(),
        query_sha256: file_sha256(&r.queries)?,
        config: RunConfig {
            interval_s: r.model.interval_s,
            headway_s: r.model.headway_s,
            psi_factor: r.model.psi_factor,
            horizon_intervals: r.model.horizon_intervals,
            k: cfg.k,
            y_s: r.y_s,
            gamma: r.gamma,
            base_elm: r.base_elm.as_ref().map(|p| p.display().to_string()),
            predictor: value_name(&r.predictor),
            replay: value_name(&r.replay),
            seed: r.seed,
            workers,
        },
        counts: RunCounts::of(qs.len(), &outcome),
        wall_times: outcome.timings,
    };
    write_run_dir(&r.out, &net, &outcome, &manifest)
        .with_context(|| format!("writing run directory {}", r.out.display()))?;
    let m = &outcome.metrics;
    println!(
        "{}: {} queries, {} completed, {} failed, {} overflowed; ajt {} min, ffcu {}, ld {} -> {}",
        cfg.algorithm,
        qs.len(),
        m.completed,
        outcome.assignment.failures.len(),
        m.overflowed,
        fmt9(m.ajt),
        fmt9(m.ffcu),
        fmt9(m.ld),
        r.out.display()
    );
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file))
        .with_context(|| format!("parsing {}", path.display()))
}

pub fn compare(c: Compare) -> Result<()> {
    let mut runs = Vec::with_capacity(c.runs.len());
    for dir in &c.runs {
        let manifest: RunManifest = read_json(&dir.join("manifest.json"))?;
        let metrics: MetricsReport = read_json(&dir.join("metrics.json"))?;
        runs.push((dir, manifest, metrics));
    }
    let (first_dir, first, _) = &runs[0];
    for (dir, m, _) in &runs[1..] {
        if m.network_sha256 != first.network_sha256 {
            bail!(
                "{} used a different network than {} ({} vs {})",
                dir.display(),
                first_dir.display(),
                m.network_file,
                first.network_file
            );
        }
        if m.query_sha256 != first.query_sha256 {
            bail!(
                "{} used a different query set than {} ({} vs {})",
                dir.display(),
                first_dir.display(),
                m.query_file,
                first.query_file
            );
        }
    }

    let sink: Box<dyn io::Write> = match &c.out {
        Some(path) => {
            Box::new(File::create(path).with_context(|| format!("creating {}", path.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record([
        "run",
        "algorithm",
        "ajt_min",
        "ffcu",
        "ld",
        "penalty_mean_min",
        "penalty_std_min",
        "end_to_end_min",
    ])?;
    for (dir, m, r) in &runs {
        w.write_record([
            dir.display().to_string(),
            m.algorithm.clone(),
            fmt9(r.ajt),
            fmt9(r.ffcu),
            fmt9(r.ld),
            fmt9(r.penalty_mean),
            fmt9(r.penalty_std),
            fmt9(m.wall_times.end_to_end_avg_min),
        ])?;
    }
    w.flush()?;
    Ok(())
}
