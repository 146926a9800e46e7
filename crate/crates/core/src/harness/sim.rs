//! Closed-loop simulation of one model from one seeded initial condition.

use std::time::{Duration, Instant};

use crate::controllers::{olfati_saber_accel, reynolds_accel};
use crate::error::{FlockError, Result};
use crate::metrics::MetricsRecord;
use crate::mpc::MpcController;
use crate::noise::{derive_run_seed, sense_all_local, sense_global, RandomStream, INIT_STREAM, SENSING_STREAM};
use crate::state::{step_dynamics, FlockConfiguration};

use super::config::{ExperimentConfig, ModelSpec, ModelTag};

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub model: ModelTag,
    pub run_id: u64,
    /// Metrics of the true configuration after steps `1..=steps`.
    pub metrics: Vec<MetricsRecord>,
    pub final_config: FlockConfiguration,
    pub wall_clock: Duration,
}

/// Samples positions and velocities uniformly from the configured boxes,
/// agent by agent, position components before velocity components.
pub fn sample_initial_config(cfg: &ExperimentConfig, rng: &mut RandomStream) -> FlockConfiguration {
    let dim = cfg.dim;
    let b = &cfg.init;
    let mut positions = Vec::with_capacity(cfg.n * dim);
    let mut velocities = Vec::with_capacity(cfg.n * dim);
    for _ in 0..cfg.n {
        for k in 0..dim {
            positions.push(rng.uniform(b.position_min[k], b.position_max[k]));
        }
        for k in 0..dim {
            velocities.push(rng.uniform(b.velocity_min[k], b.velocity_max[k]));
        }
    }
    FlockConfiguration::new(dim, positions, velocities).expect("validated config")
}

/// Per-run controller state.
enum Controller {
    Reynolds(crate::controllers::ReynoldsParams),
    OlfatiSaber(crate::controllers::OlfatiSaberParams),
    Mpc(MpcController),
}

impl Controller {
    fn new(spec: &ModelSpec, cfg: &ExperimentConfig) -> Self {
        match spec {
            ModelSpec::Reynolds(p) => Controller::Reynolds(*p),
            ModelSpec::OlfatiSaber(p) => Controller::OlfatiSaber(*p),
            ModelSpec::Mpc { model, params, solver } => {
                Controller::Mpc(MpcController::new(*model, *params, cfg.motion, *solver))
            }
        }
    }

    fn accelerations(
        &mut self,
        truth: &FlockConfiguration,
        cfg: &ExperimentConfig,
        rng: &mut RandomStream,
    ) -> Result<Vec<f64>> {
        match self {
            Controller::Mpc(mpc) if mpc.model.is_centralized() => {
                let view = sense_global(truth, &cfg.noise, rng);
                mpc.step_centralized(&view)
            }
            Controller::Mpc(mpc) => {
                let views = sense_all_local(truth, &cfg.noise, rng);
                mpc.step_distributed(&views, cfg.parallel.agents)
            }
            Controller::Reynolds(p) => {
                let views = sense_all_local(truth, &cfg.noise, rng);
                Ok(views
                    .iter()
                    .enumerate()
                    .flat_map(|(i, v)| reynolds_accel(i, v, p))
                    .collect())
            }
            Controller::OlfatiSaber(p) => {
                let views = sense_all_local(truth, &cfg.noise, rng);
                Ok(views
                    .iter()
                    .enumerate()
                    .flat_map(|(i, v)| olfati_saber_accel(i, v, p))
                    .collect())
            }
        }
    }
}

/// Runs `run_id` of `spec` with the seed derived from `cfg.base_seed`.
pub fn simulate(cfg: &ExperimentConfig, spec: &ModelSpec, run_id: u64) -> Result<RunRecord> {
    simulate_seeded(cfg, spec, run_id, derive_run_seed(cfg.base_seed, run_id))
}

pub fn simulate_seeded(cfg: &ExperimentConfig, spec: &ModelSpec, run_id: u64, seed: u64) -> Result<RunRecord> {
    let mut init_rng = RandomStream::with_stream(seed, INIT_STREAM);
    let initial = sample_initial_config(cfg, &mut init_rng);
    run_closed_loop(cfg, spec, run_id, seed, initial)
}

/// Like [`simulate`] but starting from a given configuration.
pub fn simulate_from(
    cfg: &ExperimentConfig,
    spec: &ModelSpec,
    run_id: u64,
    initial: FlockConfiguration,
) -> Result<RunRecord> {
    if initial.dim() != cfg.dim {
        return Err(FlockError::DimensionMismatch {
            expected: cfg.dim,
            actual: initial.dim(),
        });
    }
    run_closed_loop(cfg, spec, run_id, derive_run_seed(cfg.base_seed, run_id), initial)
}

/// Closed loop: sense, control, advance the true state, measure the true state.
fn run_closed_loop(
    cfg: &ExperimentConfig,
    spec: &ModelSpec,
    run_id: u64,
    seed: u64,
    initial: FlockConfiguration,
) -> Result<RunRecord> {
    let started = Instant::now();
    let mut sense_rng = RandomStream::with_stream(seed, SENSING_STREAM);
    let mut state = initial;
    let mut controller = Controller::new(spec, cfg);
    let mut metrics = Vec::with_capacity(cfg.steps);
    for step in 0..cfg.steps {
        let accel = controller
            .accelerations(&state, cfg, &mut sense_rng)
            .map_err(|e| FlockError::RunAborted {
                run_id,
                step,
                source: Box::new(e),
            })?;
        state = step_dynamics(&state, &accel, &cfg.motion)?;
        metrics.push(MetricsRecord::evaluate(&state, cfg.r));
    }
    Ok(RunRecord {
        model: spec.tag(),
        run_id,
        metrics,
        final_config: state,
        wall_clock: started.elapsed(),
    })
}
