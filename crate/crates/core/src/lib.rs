//! Simulation and benchmarking of multi-agent flocking controllers.
//!
//! Agents follow a discrete double integrator with bounded velocity and
//! acceleration. The crate provides rule-based and potential-based
//! controllers, four receding-horizon (MPC) controllers, flock quality
//! metrics, a Gaussian sensing-noise model and an experiment harness.

pub mod controllers;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod mpc;
pub mod noise;
pub mod proximity;
pub mod state;
pub mod vecmath;

pub use error::{FlockError, Result};
pub use state::{step_dynamics, AgentState, FlockConfiguration, MotionLimits, Vector};
