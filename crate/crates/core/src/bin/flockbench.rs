use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use flockbench::harness::{
    emit_plots, ensure_dir, parse_levels, read_summary_csv, run_comparison, run_noise_sweep,
    write_config_echo, write_runs_csv, write_summary_csv, ExecMode, ExperimentConfig, ModelTag,
};
use flockbench::{FlockError, Result};

#[derive(Parser)]
#[command(name = "flockbench", version, about = "Flocking controller simulations and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed; overrides `base_seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extra `key=value` overrides, e.g. `--set motion.dt=0.1`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Run batches on a single thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one model and write per-step metrics.
    Simulate {
        #[arg(long)]
        model: Option<ModelTag>,
        #[arg(long)]
        runs: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Run several models on paired initial conditions.
    Compare {
        #[arg(long)]
        runs: Option<usize>,
        /// `all` or a comma-separated list of models.
        #[arg(long, default_value = "all")]
        models: String,
        #[command(flatten)]
        common: Common,
    },
    /// Repeat the comparison at increasing sensing-noise levels.
    NoiseSweep {
        /// `a..b` (inclusive) or a comma-separated list.
        #[arg(long, default_value = "1..10")]
        levels: String,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, default_value = "all")]
        models: String,
        #[command(flatten)]
        common: Common,
    },
    /// Render SVG charts from a summary CSV.
    Plot {
        #[arg(long)]
        summary: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

impl Common {
    fn load(&self, model: Option<ModelTag>, runs: Option<usize>) -> Result<ExperimentConfig> {
        let mut overrides = Vec::new();
        if let Some(m) = model {
            overrides.push(format!("model=\"{m}\""));
        }
        if let Some(r) = runs {
            overrides.push(format!("runs={r}"));
        }
        if let Some(s) = self.seed {
            overrides.push(format!("base_seed={s}"));
        }
        if let Some(o) = &self.out {
            overrides.push(format!("output_dir={}", toml_string(o)));
        }
        overrides.extend(self.overrides.iter().cloned());
        match &self.config {
            Some(path) => ExperimentConfig::load(path, &overrides),
            None => ExperimentConfig::from_toml_with_overrides("", &overrides),
        }
    }

    fn mode(&self) -> ExecMode {
        if self.sequential {
            ExecMode::Sequential
        } else {
            ExecMode::Parallel
        }
    }
}

fn toml_string(p: &Path) -> String {
    toml::Value::String(p.display().to_string()).to_string()
}

fn prepare(cfg: &ExperimentConfig) -> Result<()> {
    ensure_dir(&cfg.output_dir)?;
    write_config_echo(&cfg.output_dir, cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { model, runs, common } => {
            let cfg = common.load(model, runs)?;
            prepare(&cfg)?;
            let cmp = run_comparison(&cfg, &[cfg.model], common.mode())?;
            write_runs_csv(&cfg.output_dir.join("runs.csv"), &cmp.batches[0].1)?;
            write_summary_csv(&cfg.output_dir.join("summary.csv"), &cmp.summary)?;
            println!("wrote {}", cfg.output_dir.display());
        }
        Command::Compare { runs, models, common } => {
            let cfg = common.load(None, runs)?;
            let models = ModelTag::parse_list(&models)?;
            prepare(&cfg)?;
            let cmp = run_comparison(&cfg, &models, common.mode())?;
            let records: Vec<_> = cmp.batches.iter().flat_map(|(_, runs)| runs.iter().cloned()).collect();
            write_runs_csv(&cfg.output_dir.join("runs.csv"), &records)?;
            write_summary_csv(&cfg.output_dir.join("summary.csv"), &cmp.summary)?;
            println!("wrote {}", cfg.output_dir.display());
        }
        Command::NoiseSweep {
            levels,
            runs,
            models,
            common,
        } => {
            let cfg = common.load(None, runs)?;
            let models = ModelTag::parse_list(&models)?;
            let levels = parse_levels(&levels).map_err(FlockError::Config)?;
            prepare(&cfg)?;
            let sweep = run_noise_sweep(&cfg, &models, &levels, common.mode())?;
            for &level in &levels {
                let records: Vec<_> = sweep
                    .batches
                    .iter()
                    .filter(|(l, _, _)| *l == level)
                    .flat_map(|(_, _, runs)| runs.iter().cloned())
                    .collect();
                write_runs_csv(&cfg.output_dir.join(format!("runs_level_{level:02}.csv")), &records)?;
            }
            write_summary_csv(&cfg.output_dir.join("summary.csv"), &sweep.summary)?;
            println!("wrote {}", cfg.output_dir.display());
        }
        Command::Plot { summary, out } => {
            let summary = read_summary_csv(&summary)?;
            ensure_dir(&out)?;
            for p in emit_plots(&summary, &out)? {
                println!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

fn error_kind(e: &FlockError) -> &'static str {
    match e {
        FlockError::DimensionMismatch { .. } | FlockError::LengthMismatch { .. } => "dimension",
        FlockError::IndexOutOfRange { .. } => "index",
        FlockError::InvalidParameter(_) => "parameter",
        FlockError::NonFiniteObjective { .. } => "solver",
        FlockError::RunAborted { .. } => "run_aborted",
        FlockError::Config(_) => "config",
        FlockError::Io { .. } => "io",
        FlockError::Csv { .. } => "csv",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error kind={} msg={msg:?}", error_kind(&e));
            ExitCode::FAILURE
        }
    }
}
