//! Experiment orchestration: configuration, seeded runs, batch experiments
//! and result files.

mod config;
mod experiments;
mod output;
mod plot;
mod sim;

pub use config::{
    ExperimentConfig, InitBoxes, ModelSpec, ModelTag, MpcSection, OlfatiSaberShape, ParallelSection,
};
pub use experiments::{
    parse_levels, run_batch, run_comparison, run_noise_sweep, summarize_steps, Axis, Comparison,
    ExecMode, MeanMetrics, NoiseSweep, Summary, SummaryRow,
};
pub use output::{
    ensure_dir, fmt_f64, read_summary_csv, write_config_echo, write_runs_csv, write_summary_csv,
    RUNS_HEADER,
};
pub use plot::{emit_plots, render_svg, Metric};
pub use sim::{sample_initial_config, simulate, simulate_from, simulate_seeded, RunRecord};
