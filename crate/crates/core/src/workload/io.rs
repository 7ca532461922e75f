use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::network::RoadNetwork;
use crate::routing::Query;
use crate::time::interval_of;

use super::{QuerySet, WorkloadError};

/// Reads a `query_id,src,dst,depart_s` CSV. Lines starting with `#` are ignored.
pub fn load_queries(path: impl AsRef<Path>, net: &RoadNetwork) -> Result<QuerySet, WorkloadError> {
    let cfg = net.config();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| WorkloadError::Invalid(format!("missing column `{name}`")))
    };
    let (c_id, c_src, c_dst, c_dep) =
        (col("query_id")?, col("src")?, col("dst")?, col("depart_s")?);

    let mut seen = HashSet::new();
    let mut queries = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize, what: &str| {
            record.get(i).ok_or_else(|| WorkloadError::Parse {
                line,
                message: format!("missing {what}"),
            })
        };
        let int = |i: usize, what: &str| -> Result<u64, WorkloadError> {
            field(i, what)?.parse().map_err(|_| WorkloadError::Parse {
                line,
                message: format!("bad {what}"),
            })
        };
        let id = int(c_id, "query_id")?;
        let (src, dst) = (int(c_src, "src")?, int(c_dst, "dst")?);
        let depart_s: f64 =
            field(c_dep, "depart_s")?
                .parse()
                .map_err(|_| WorkloadError::Parse {
                    line,
                    message: "bad depart_s".into(),
                })?;
        if src == dst {
            return Err(WorkloadError::SameEndpoints { line, label: src });
        }
        let node = |label: u64| {
            net.node_by_label(label)
                .ok_or(WorkloadError::UnknownNode { line, label })
        };
        let (source, destination) = (node(src)?, node(dst)?);
        let depart = cfg.time_to_intervals(depart_s);
        if !(depart >= 0.0) || interval_of(depart) >= cfg.horizon_intervals {
            return Err(WorkloadError::OutOfHorizon { line, depart_s });
        }
        if !seen.insert(id) {
            return Err(WorkloadError::DuplicateId { line, id });
        }
        queries.push(Query::new(id, source, destination, depart));
    }
    Ok(QuerySet::new(queries))
}

/// Writes `qs` as CSV. Each line of `comment` becomes a leading `#` line.
pub fn save_queries(
    net: &RoadNetwork,
    qs: &QuerySet,
    path: impl AsRef<Path>,
    comment: Option<&str>,
) -> Result<(), WorkloadError> {
    let cfg = net.config();
    let mut w = BufWriter::new(File::create(path)?);
    for line in comment.into_iter().flat_map(str::lines) {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "query_id,src,dst,depart_s")?;
    for q in qs.queries() {
        writeln!(
            w,
            "{},{},{},{}",
            q.id,
            net.node_label(q.source),
            net.node_label(q.destination),
            // Microsecond rounding undoes the float noise of the unit round trip.
            (cfg.intervals_to_time(q.depart) * 1e6).round() / 1e6
        )?;
    }
    w.flush()?;
    Ok(())
}
