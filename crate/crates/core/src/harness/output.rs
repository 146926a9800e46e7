//! CSV persistence of runs and summaries.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which round-trips
//! every `f64` and makes files diffable byte for byte.

use std::fs::File;
use std::path::Path;

use crate::error::{FlockError, Result};

use super::config::{ExperimentConfig, ModelTag};
use super::experiments::{Axis, MeanMetrics, Summary, SummaryRow};
use super::sim::RunRecord;

pub const RUNS_HEADER: [&str; 7] = [
    "model",
    "run_id",
    "step",
    "num_components",
    "max_diameter",
    "velocity_convergence",
    "irregularity",
];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| FlockError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

/// One row per run and step, runs in the given order, steps ascending from 1.
pub fn write_runs_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = writer(path)?;
    let err = |e| FlockError::csv(path, e);
    w.write_record(RUNS_HEADER).map_err(err)?;
    for rec in records {
        for (s, m) in rec.metrics.iter().enumerate() {
            w.write_record([
                rec.model.as_str().to_string(),
                rec.run_id.to_string(),
                (s + 1).to_string(),
                m.num_components.to_string(),
                fmt_opt(m.max_diameter),
                fmt_f64(m.velocity_convergence),
                fmt_f64(m.irregularity),
            ])
            .map_err(err)?;
        }
    }
    w.flush().map_err(|e| FlockError::io(path, e))
}

fn summary_header(axis: Axis) -> [&'static str; 8] {
    [
        "model",
        axis.as_str(),
        "runs",
        "num_components",
        "max_diameter",
        "max_diameter_missing",
        "velocity_convergence",
        "irregularity",
    ]
}

pub fn write_summary_csv(path: &Path, summary: &Summary) -> Result<()> {
    let mut w = writer(path)?;
    let err = |e| FlockError::csv(path, e);
    w.write_record(summary_header(summary.axis)).map_err(err)?;
    for row in &summary.rows {
        let m = &row.means;
        w.write_record([
            row.model.as_str().to_string(),
            row.x.to_string(),
            m.runs.to_string(),
            fmt_f64(m.num_components),
            fmt_opt(m.max_diameter),
            m.diameter_missing.to_string(),
            fmt_f64(m.velocity_convergence),
            fmt_f64(m.irregularity),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| FlockError::io(path, e))
}

pub fn read_summary_csv(path: &Path) -> Result<Summary> {
    let file = File::open(path).map_err(|e| FlockError::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let bad = |m: String| FlockError::Config(format!("{}: {m}", path.display()));
    let headers = r.headers().map_err(|e| FlockError::csv(path, e))?.clone();
    let axis = match headers.get(1) {
        Some("step") => Axis::Step,
        Some("level") => Axis::Level,
        other => return Err(bad(format!("unexpected summary header {other:?}"))),
    };
    if headers.iter().ne(summary_header(axis)) {
        return Err(bad("unexpected summary header".into()));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| FlockError::csv(path, e))?;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let num = |k: usize| -> Result<f64> {
            field(k)
                .parse()
                .map_err(|_| bad(format!("row {}: bad number '{}'", line + 1, field(k))))
        };
        let int = |k: usize| -> Result<u64> {
            field(k)
                .parse()
                .map_err(|_| bad(format!("row {}: bad integer '{}'", line + 1, field(k))))
        };
        let model: ModelTag = field(0).parse()?;
        rows.push(SummaryRow {
            model,
            x: int(1)?,
            means: MeanMetrics {
                runs: int(2)? as usize,
                num_components: num(3)?,
                max_diameter: if field(4).is_empty() { None } else { Some(num(4)?) },
                diameter_missing: int(5)? as usize,
                velocity_convergence: num(6)?,
                irregularity: num(7)?,
            },
        });
    }
    Ok(Summary { axis, rows })
}

/// Writes the effective configuration next to the results.
pub fn write_config_echo(dir: &Path, cfg: &ExperimentConfig) -> Result<()> {
    let path = dir.join("effective_config.toml");
    std::fs::write(&path, cfg.to_toml_string()).map_err(|e| FlockError::io(&path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| FlockError::io(dir, e))
}
