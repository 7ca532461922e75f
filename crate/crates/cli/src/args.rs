use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tlan_core::simulation::{Algorithm, PredictorKind, ReplayMode};
use tlan_core::NetworkConfig;

#[derive(Debug, Parser)]
#[command(
    name = "tlan",
    version,
    about = "Temporal load-aware routing experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic network, a query set or a background load matrix.
    Generate(Generate),
    /// Plan, replay and evaluate one algorithm; writes a run directory.
    Route(Route),
    /// Tabulate the metrics of several run directories as CSV.
    Compare(Compare),
}

#[derive(Debug, Args)]
pub struct Generate {
    #[command(subcommand)]
    pub kind: GenerateKind,
}

#[derive(Debug, Subcommand)]
pub enum GenerateKind {
    /// Bidirectional grid. `.json` output writes a single document, anything
    /// else an edge CSV plus a `.nodes.csv` sibling.
    Network(GridArgs),
    /// Seeded hotspot workload over an existing network.
    Queries(QueryArgs),
    /// Load matrix of a chronological load-aware run, for use as `--base-elm`.
    BaseElm(BaseElmArgs),
}

/// Time and capacity model applied when a network file is loaded.
#[derive(Debug, Clone, Copy, Args)]
pub struct ModelArgs {
    /// Interval length I, seconds.
    #[arg(long, default_value_t = 360.0, value_parser = positive)]
    pub interval_s: f64,
    /// Base headway between vehicles, seconds.
    #[arg(long, default_value_t = 3.0, value_parser = positive)]
    pub headway_s: f64,
    /// Transition penalty as a fraction of free-flow traversal time.
    #[arg(long, default_value_t = 0.5, value_parser = non_negative)]
    pub psi_factor: f64,
    /// Number of tracked intervals.
    #[arg(long, default_value_t = 240, value_parser = clap::value_parser!(u32).range(1..))]
    pub horizon_intervals: u32,
    /// Wall-clock second at which the first interval starts.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub time_origin_s: f64,
}

impl ModelArgs {
    pub fn config(&self) -> NetworkConfig {
        NetworkConfig {
            interval_length_s: self.interval_s,
            base_headway_s: self.headway_s,
            transition_penalty_factor: self.psi_factor,
            horizon_intervals: self.horizon_intervals,
            time_origin_s: self.time_origin_s,
        }
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub rows: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub cols: u32,
    #[arg(long, default_value_t = 400.0, value_parser = positive)]
    pub edge_len_m: f64,
    #[arg(long, default_value_t = 10.0, value_parser = positive)]
    pub speed_mps: f64,
    /// Relative per-edge speed jitter in [0, 1).
    #[arg(long, default_value_t = 0.0, value_parser = jitter)]
    pub jitter: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub network: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Start of the departure window, seconds.
    #[arg(long, default_value_t = 0.0)]
    pub window_start_s: f64,
    /// End of the departure window, seconds.
    #[arg(long, default_value_t = 3600.0)]
    pub window_end_s: f64,
    /// Share of queries with one endpoint in the hotspot.
    #[arg(long, default_value_t = 0.0, value_parser = fraction)]
    pub hotspot_bias: f64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub hotspot_size: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct BaseElmArgs {
    #[arg(long)]
    pub network: PathBuf,
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AlgArg {
    Ffnd,
    Slad,
    Tlatk,
    Tlaa,
    Csmat,
}

impl From<AlgArg> for Algorithm {
    fn from(a: AlgArg) -> Self {
        match a {
            AlgArg::Ffnd => Algorithm::Ffnd,
            AlgArg::Slad => Algorithm::Slad,
            AlgArg::Tlatk => Algorithm::Tlatk,
            AlgArg::Tlaa => Algorithm::Tlaa,
            AlgArg::Csmat => Algorithm::Csmat,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PredictorArg {
    Zero,
    Table,
}

impl From<PredictorArg> for PredictorKind {
    fn from(p: PredictorArg) -> Self {
        match p {
            PredictorArg::Zero => PredictorKind::Zero,
            PredictorArg::Table => PredictorKind::Table,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReplayArg {
    Event,
    InOrder,
}

impl From<ReplayArg> for ReplayMode {
    fn from(r: ReplayArg) -> Self {
        match r {
            ReplayArg::Event => ReplayMode::EventDriven,
            ReplayArg::InOrder => ReplayMode::InOrder,
        }
    }
}

#[derive(Debug, Args)]
pub struct Route {
    #[arg(long, value_enum)]
    pub alg: AlgArg,
    #[arg(long)]
    pub network: PathBuf,
    #[arg(long)]
    pub queries: PathBuf,
    /// Run directory to create.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Candidate routes for top-k selection.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    /// Collective batch window, seconds.
    #[arg(long, default_value_t = 14_400.0, value_parser = positive)]
    pub y_s: f64,
    /// Candidate-set cap for collective assignment; 0 is unlimited.
    #[arg(long, default_value_t = 0)]
    pub max_candidates: usize,
    #[arg(long, value_enum, default_value_t = PredictorArg::Table)]
    pub predictor: PredictorArg,
    #[arg(long, value_enum, default_value_t = ReplayArg::Event)]
    pub replay: ReplayArg,
    /// Controlled share of traffic; the rest of `--base-elm` stays as background.
    #[arg(long, value_parser = fraction, requires = "base_elm")]
    pub gamma: Option<f64>,
    /// Load matrix CSV from `generate base-elm`.
    #[arg(long, requires = "gamma")]
    pub base_elm: Option<PathBuf>,
    /// Recorded in the manifest; every algorithm is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for collective assignment. Defaults to all cores.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
}

#[derive(Debug, Args)]
pub struct Compare {
    /// Run directories written by `route`.
    #[arg(required = true, num_args = 2..)]
    pub runs: Vec<PathBuf>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    number(s).and_then(|v| {
        if v > 0.0 {
            Ok(v)
        } else {
            Err("must be > 0".into())
        }
    })
}

fn non_negative(s: &str) -> Result<f64, String> {
    number(s).and_then(|v| {
        if v >= 0.0 {
            Ok(v)
        } else {
            Err("must be >= 0".into())
        }
    })
}

fn fraction(s: &str) -> Result<f64, String> {
    number(s).and_then(|v| {
        if (0.0..=1.0).contains(&v) {
            Ok(v)
        } else {
            Err("must lie in [0, 1]".into())
        }
    })
}

fn jitter(s: &str) -> Result<f64, String> {
    number(s).and_then(|v| {
        if (0.0..1.0).contains(&v) {
            Ok(v)
        } else {
            Err("must lie in [0, 1)".into())
        }
    })
}
