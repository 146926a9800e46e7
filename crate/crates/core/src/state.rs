//! Agent state, motion limits and the discrete-time double-integrator step.
//!
//! A [`FlockConfiguration`] stores positions and velocities of all agents as
//! two flat row-major buffers of length `n * dim`. Agents are addressed by a
//! zero-based index that stays fixed for the lifetime of a run.

use serde::{Deserialize, Serialize};

use crate::error::{FlockError, Result};
use crate::vecmath;

/// A point or direction in `R^m`.
pub type Vector = Vec<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub position: Vector,
    pub velocity: Vector,
}

/// Velocity bound, acceleration bound and time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MotionLimits {
    pub v_max: f64,
    pub a_max: f64,
    pub dt: f64,
}

impl MotionLimits {
    pub fn new(v_max: f64, a_max: f64, dt: f64) -> Result<Self> {
        let limits = MotionLimits { v_max, a_max, dt };
        limits.validate()?;
        Ok(limits)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("v_max", self.v_max), ("a_max", self.a_max), ("dt", self.dt)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(FlockError::InvalidParameter(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for MotionLimits {
    fn default() -> Self {
        MotionLimits {
            v_max: 8.0,
            a_max: 1.0,
            dt: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlockConfiguration {
    dim: usize,
    positions: Vec<f64>,
    velocities: Vec<f64>,
}

impl FlockConfiguration {
    pub fn new(dim: usize, positions: Vec<f64>, velocities: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(FlockError::InvalidParameter("dimension must be >= 1".into()));
        }
        if positions.len() % dim != 0 || positions.is_empty() {
            return Err(FlockError::LengthMismatch {
                what: "positions",
                expected: dim * (positions.len() / dim).max(1),
                actual: positions.len(),
            });
        }
        if velocities.len() != positions.len() {
            return Err(FlockError::LengthMismatch {
                what: "velocities",
                expected: positions.len(),
                actual: velocities.len(),
            });
        }
        Ok(FlockConfiguration {
            dim,
            positions,
            velocities,
        })
    }

    pub fn from_agents(agents: &[AgentState]) -> Result<Self> {
        let dim = agents
            .first()
            .map(|a| a.position.len())
            .ok_or_else(|| FlockError::InvalidParameter("at least one agent required".into()))?;
        let mut positions = Vec::with_capacity(agents.len() * dim);
        let mut velocities = Vec::with_capacity(agents.len() * dim);
        for agent in agents {
            for v in [&agent.position, &agent.velocity] {
                if v.len() != dim {
                    return Err(FlockError::DimensionMismatch {
                        expected: dim,
                        actual: v.len(),
                    });
                }
            }
            positions.extend_from_slice(&agent.position);
            velocities.extend_from_slice(&agent.velocity);
        }
        FlockConfiguration::new(dim, positions, velocities)
    }

    /// Builds a configuration from 2D positions with zero velocities.
    pub fn from_points_2d(points: &[[f64; 2]]) -> Result<Self> {
        let positions: Vec<f64> = points.iter().flatten().copied().collect();
        let velocities = vec![0.0; positions.len()];
        FlockConfiguration::new(2, positions, velocities)
    }

    pub fn n(&self) -> usize {
        self.positions.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn position(&self, i: usize) -> &[f64] {
        &self.positions[i * self.dim..(i + 1) * self.dim]
    }

    pub fn velocity(&self, i: usize) -> &[f64] {
        &self.velocities[i * self.dim..(i + 1) * self.dim]
    }

    pub fn position_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.positions[i * self.dim..(i + 1) * self.dim]
    }

    pub fn velocity_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.velocities[i * self.dim..(i + 1) * self.dim]
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn velocities(&self) -> &[f64] {
        &self.velocities
    }

    pub fn positions_mut(&mut self) -> &mut [f64] {
        &mut self.positions
    }

    pub fn velocities_mut(&mut self) -> &mut [f64] {
        &mut self.velocities
    }

    pub fn agent(&self, i: usize) -> AgentState {
        AgentState {
            position: self.position(i).to_vec(),
            velocity: self.velocity(i).to_vec(),
        }
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        vecmath::dist(self.position(i), self.position(j))
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n() {
            Ok(())
        } else {
            Err(FlockError::IndexOutOfRange {
                index: i,
                n: self.n(),
            })
        }
    }

    /// Shifts every position by `offset`.
    pub fn translated(&self, offset: &[f64]) -> FlockConfiguration {
        let mut out = self.clone();
        for p in out.positions.chunks_exact_mut(self.dim) {
            vecmath::axpy(1.0, offset, p);
        }
        out
    }

    /// Applies a 2D rotation by `angle` to positions and velocities.
    pub fn rotated_2d(&self, angle: f64) -> FlockConfiguration {
        assert_eq!(self.dim, 2, "rotated_2d requires a 2D configuration");
        let (s, c) = angle.sin_cos();
        let mut out = self.clone();
        for buf in [&mut out.positions, &mut out.velocities] {
            for p in buf.chunks_exact_mut(2) {
                let (x, y) = (p[0], p[1]);
                p[0] = c * x - s * y;
                p[1] = s * x + c * y;
            }
        }
        out
    }
}

/// Advances the true state by one step.
///
/// `accel` is a flat `n * dim` buffer. Each acceleration is first projected
/// onto `||a|| <= a_max`; the new velocity `v + dt * a` is projected onto
/// `||v|| <= v_max`; positions advance with the velocity of the current step.
pub fn step_dynamics(
    config: &FlockConfiguration,
    accel: &[f64],
    limits: &MotionLimits,
) -> Result<FlockConfiguration> {
    let dim = config.dim();
    if accel.len() != config.positions.len() {
        return Err(FlockError::DimensionMismatch {
            expected: config.positions.len(),
            actual: accel.len(),
        });
    }
    let mut next = config.clone();
    let mut a = vec![0.0; dim];
    for i in 0..config.n() {
        a.copy_from_slice(&accel[i * dim..(i + 1) * dim]);
        vecmath::project_ball(&mut a, limits.a_max);
        vecmath::axpy(limits.dt, config.velocity(i), next.position_mut(i));
        let v = next.velocity_mut(i);
        vecmath::axpy(limits.dt, &a, v);
        vecmath::project_ball(v, limits.v_max);
    }
    Ok(next)
}
