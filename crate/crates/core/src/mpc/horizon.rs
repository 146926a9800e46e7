//! Control sequences over the prediction horizon and the rollouts that turn
//! them into predicted configurations.

use crate::error::{FlockError, Result};
use crate::state::{FlockConfiguration, MotionLimits};
use crate::vecmath;

/// Accelerations `a(k+t|k)` for `agents` controlled agents, `t = 0..horizon`.
///
/// Stored flat, indexed `[t][agent][component]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonControls {
    horizon: usize,
    agents: usize,
    dim: usize,
    data: Vec<f64>,
}

impl HorizonControls {
    pub fn zeros(horizon: usize, agents: usize, dim: usize) -> Self {
        HorizonControls {
            horizon,
            agents,
            dim,
            data: vec![0.0; horizon * agents * dim],
        }
    }

    pub fn from_flat(horizon: usize, agents: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != horizon * agents * dim {
            return Err(FlockError::LengthMismatch {
                what: "horizon controls",
                expected: horizon * agents * dim,
                actual: data.len(),
            });
        }
        Ok(HorizonControls {
            horizon,
            agents,
            dim,
            data,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Stacked accelerations of all controlled agents at predicted step `t`.
    pub fn step(&self, t: usize) -> &[f64] {
        let w = self.agents * self.dim;
        &self.data[t * w..(t + 1) * w]
    }

    pub fn get(&self, t: usize, agent: usize) -> &[f64] {
        let start = (t * self.agents + agent) * self.dim;
        &self.data[start..start + self.dim]
    }

    pub fn get_mut(&mut self, t: usize, agent: usize) -> &mut [f64] {
        let start = (t * self.agents + agent) * self.dim;
        &mut self.data[start..start + self.dim]
    }

    /// Projects every per-agent, per-step acceleration onto `||a|| <= a_max`.
    pub fn project(&mut self, a_max: f64) {
        project_blocks(&mut self.data, self.dim, a_max);
    }

    pub fn is_feasible(&self, a_max: f64, tol: f64) -> bool {
        self.data
            .chunks_exact(self.dim)
            .all(|a| vecmath::norm(a) <= a_max + tol)
    }

    /// Drops step 0, shifts the rest forward and zero-pads the last step.
    pub fn shifted(&self) -> HorizonControls {
        let w = self.agents * self.dim;
        let mut data = vec![0.0; self.data.len()];
        if self.horizon > 1 {
            data[..(self.horizon - 1) * w].copy_from_slice(&self.data[w..]);
        }
        HorizonControls { data, ..*self }
    }

    pub fn squared_norm(&self) -> f64 {
        vecmath::norm_sq(&self.data)
    }
}

pub(crate) fn project_blocks(data: &mut [f64], dim: usize, bound: f64) {
    for a in data.chunks_exact_mut(dim) {
        vecmath::project_ball(a, bound);
    }
}

/// Predicted configurations for steps `k..=k+T`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedTrajectory {
    pub steps: Vec<FlockConfiguration>,
}

impl PredictedTrajectory {
    pub fn horizon(&self) -> usize {
        self.steps.len() - 1
    }
}

fn check_controls(controls: &HorizonControls, agents: usize, dim: usize) -> Result<()> {
    if controls.dim != dim {
        return Err(FlockError::DimensionMismatch {
            expected: dim,
            actual: controls.dim,
        });
    }
    if controls.agents != agents {
        return Err(FlockError::LengthMismatch {
            what: "controlled agents",
            expected: agents,
            actual: controls.agents,
        });
    }
    if controls.horizon == 0 {
        return Err(FlockError::InvalidParameter("horizon must be >= 1".into()));
    }
    Ok(())
}

/// Double-integrator prediction of the whole flock from a (noisy) snapshot.
/// Predicted velocities are clamped to `v_max` as in the executed dynamics.
pub fn rollout_centralized(
    init: &FlockConfiguration,
    controls: &HorizonControls,
    limits: &MotionLimits,
) -> Result<PredictedTrajectory> {
    check_controls(controls, init.n(), init.dim())?;
    let mut steps = Vec::with_capacity(controls.horizon + 1);
    steps.push(init.clone());
    for t in 0..controls.horizon {
        let prev = &steps[t];
        let mut next = prev.clone();
        let dt = limits.dt;
        for (x, v) in next.positions_mut().iter_mut().zip(prev.velocities()) {
            *x += dt * v;
        }
        vecmath::axpy(dt, controls.step(t), next.velocities_mut());
        for v in next.velocities_mut().chunks_exact_mut(init.dim()) {
            vecmath::project_ball(v, limits.v_max);
        }
        steps.push(next);
    }
    Ok(PredictedTrajectory { steps })
}

/// Compact snapshot for a distributed MPC solve: agent `i` at local index 0
/// followed by its frozen neighbor set in ascending order.
pub fn local_snapshot(
    view: &FlockConfiguration,
    i: usize,
    neighbor_set: &[usize],
) -> Result<FlockConfiguration> {
    view.check_index(i)?;
    let dim = view.dim();
    let mut positions = Vec::with_capacity((neighbor_set.len() + 1) * dim);
    let mut velocities = Vec::with_capacity((neighbor_set.len() + 1) * dim);
    for &j in std::iter::once(&i).chain(neighbor_set) {
        view.check_index(j)?;
        positions.extend_from_slice(view.position(j));
        velocities.extend_from_slice(view.velocity(j));
    }
    FlockConfiguration::new(dim, positions, velocities)
}

/// Prediction used by agent `i` in the distributed models.
///
/// Agent `i` follows the controlled double integrator; each neighbor in the
/// frozen `neighbor_set` moves with its sensed velocity held constant. The
/// returned configurations are compact (see [`local_snapshot`]); local index
/// 0 is agent `i` and local index `1 + m` is `neighbor_set[m]`.
pub fn rollout_distributed(
    i: usize,
    view: &FlockConfiguration,
    controls: &HorizonControls,
    neighbor_set: &[usize],
    limits: &MotionLimits,
) -> Result<PredictedTrajectory> {
    check_controls(controls, 1, view.dim())?;
    let init = local_snapshot(view, i, neighbor_set)?;
    Ok(rollout_local(&init, controls.as_slice(), controls.horizon, limits))
}

pub(crate) fn rollout_local(
    init: &FlockConfiguration,
    controls: &[f64],
    horizon: usize,
    limits: &MotionLimits,
) -> PredictedTrajectory {
    let dim = init.dim();
    let dt = limits.dt;
    let mut steps = Vec::with_capacity(horizon + 1);
    steps.push(init.clone());
    for t in 0..horizon {
        let prev = &steps[t];
        let mut next = prev.clone();
        for (x, v) in next.positions_mut().iter_mut().zip(prev.velocities()) {
            *x += dt * v;
        }
        let own_v = next.velocity_mut(0);
        vecmath::axpy(dt, &controls[t * dim..(t + 1) * dim], own_v);
        vecmath::project_ball(own_v, limits.v_max);
        steps.push(next);
    }
    PredictedTrajectory { steps }
}
