//! Batches of runs and the two aggregate experiments.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;
use crate::metrics::MetricsRecord;
use crate::noise::NoiseSpec;

use super::config::{ExperimentConfig, ModelTag};
use super::sim::{simulate, RunRecord};

/// How independent runs of a batch are scheduled. Results do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

fn map_runs<T: Send>(mode: ExecMode, jobs: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    #[cfg(feature = "parallel")]
    if mode == ExecMode::Parallel {
        return (0..jobs).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..jobs).map(f).collect()
}

/// Runs `0..cfg.runs` of one model. Run `j` starts from the initial condition
/// seeded by `(cfg.base_seed, j)` whatever the model, so batches are paired.
pub fn run_batch(cfg: &ExperimentConfig, tag: ModelTag, mode: ExecMode) -> Result<Vec<RunRecord>> {
    let spec = cfg.model_spec(tag);
    map_runs(mode, cfg.runs, |j| simulate(cfg, &spec, j as u64))
}

/// Means over runs of one point of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanMetrics {
    pub runs: usize,
    pub num_components: f64,
    /// Mean over the runs whose diameter is defined; `None` if there is none.
    pub max_diameter: Option<f64>,
    /// Number of runs whose diameter was undefined.
    pub diameter_missing: usize,
    pub velocity_convergence: f64,
    pub irregularity: f64,
}

impl MeanMetrics {
    pub fn of<'a>(records: impl IntoIterator<Item = &'a MetricsRecord>) -> MeanMetrics {
        let mut m = MeanMetrics {
            runs: 0,
            num_components: 0.0,
            max_diameter: None,
            diameter_missing: 0,
            velocity_convergence: 0.0,
            irregularity: 0.0,
        };
        let mut diam_sum = 0.0;
        for r in records {
            m.runs += 1;
            m.num_components += r.num_components as f64;
            m.velocity_convergence += r.velocity_convergence;
            m.irregularity += r.irregularity;
            match r.max_diameter {
                Some(d) => diam_sum += d,
                None => m.diameter_missing += 1,
            }
        }
        if m.runs > 0 {
            let k = m.runs as f64;
            m.num_components /= k;
            m.velocity_convergence /= k;
            m.irregularity /= k;
        }
        let defined = m.runs - m.diameter_missing;
        if defined > 0 {
            m.max_diameter = Some(diam_sum / defined as f64);
        }
        m
    }
}

/// Independent variable of a summary: simulation step or noise level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Step,
    Level,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Step => "step",
            Axis::Level => "level",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub model: ModelTag,
    pub x: u64,
    pub means: MeanMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub axis: Axis,
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    /// Models in order of first appearance.
    pub fn models(&self) -> Vec<ModelTag> {
        let mut out: Vec<ModelTag> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.model) {
                out.push(r.model);
            }
        }
        out
    }

    pub fn series(&self, model: ModelTag) -> impl Iterator<Item = &SummaryRow> {
        self.rows.iter().filter(move |r| r.model == model)
    }

    /// Row with the largest `x` for `model`.
    pub fn last(&self, model: ModelTag) -> Option<&SummaryRow> {
        self.series(model).max_by_key(|r| r.x)
    }

    pub fn at(&self, model: ModelTag, x: u64) -> Option<&SummaryRow> {
        self.series(model).find(|r| r.x == x)
    }
}

/// Per-step means over the runs of each batch, steps numbered from 1.
pub fn summarize_steps(batches: &[(ModelTag, Vec<RunRecord>)]) -> Summary {
    let mut rows = Vec::new();
    for (model, runs) in batches {
        let steps = runs.iter().map(|r| r.metrics.len()).max().unwrap_or(0);
        for s in 0..steps {
            rows.push(SummaryRow {
                model: *model,
                x: s as u64 + 1,
                means: MeanMetrics::of(runs.iter().filter_map(|r| r.metrics.get(s))),
            });
        }
    }
    Summary {
        axis: Axis::Step,
        rows,
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub batches: Vec<(ModelTag, Vec<RunRecord>)>,
    pub summary: Summary,
}

pub fn run_comparison(cfg: &ExperimentConfig, models: &[ModelTag], mode: ExecMode) -> Result<Comparison> {
    let batches = models
        .iter()
        .map(|&m| Ok((m, run_batch(cfg, m, mode)?)))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize_steps(&batches);
    Ok(Comparison { batches, summary })
}

#[derive(Debug, Clone)]
pub struct NoiseSweep {
    /// `(level, model, runs)` in level-major order.
    pub batches: Vec<(u32, ModelTag, Vec<RunRecord>)>,
    pub summary: Summary,
}

/// Repeats the batch of each model at every noise level and averages the
/// final-step metrics.
pub fn run_noise_sweep(
    cfg: &ExperimentConfig,
    models: &[ModelTag],
    levels: &[u32],
    mode: ExecMode,
) -> Result<NoiseSweep> {
    let mut batches = Vec::new();
    let mut rows = Vec::new();
    for &level in levels {
        let leveled = ExperimentConfig {
            noise: NoiseSpec::level(level),
            ..cfg.clone()
        };
        for &model in models {
            let runs = run_batch(&leveled, model, mode)?;
            rows.push(SummaryRow {
                model,
                x: level as u64,
                means: MeanMetrics::of(runs.iter().filter_map(|r| r.metrics.last())),
            });
            batches.push((level, model, runs));
        }
    }
    rows.sort_by_key(|r| (ModelTag::ALL.iter().position(|&m| m == r.model), r.x));
    Ok(NoiseSweep {
        batches,
        summary: Summary {
            axis: Axis::Level,
            rows,
        },
    })
}

/// Parses `a..b` (inclusive) or a comma-separated list of levels.
pub fn parse_levels(s: &str) -> std::result::Result<Vec<u32>, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|e| format!("bad level range '{s}': {e}"))?;
        let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|e| format!("bad level range '{s}': {e}"))?;
        if a > b {
            return Err(format!("empty level range '{s}'"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|e| format!("bad level '{t}': {e}")))
        .collect()
}
