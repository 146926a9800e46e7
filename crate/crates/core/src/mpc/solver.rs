//! Projected gradient descent over products of Euclidean balls.

use serde::{Deserialize, Serialize};

use super::horizon::project_blocks;
use crate::error::{FlockError, Result};

/// A smooth objective over a flat decision vector.
pub trait Objective {
    fn value(&self, u: &[f64]) -> f64;

    /// Returns the value and writes the gradient into `grad`.
    fn value_and_gradient(&self, u: &[f64], grad: &mut [f64]) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    pub initial_step: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    /// Line search gives up once the step falls below this value.
    pub min_step: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            initial_step: 1.0,
            tolerance: 1e-6,
            max_iterations: 200,
            armijo: 1e-4,
            min_step: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    /// Objective value at the start and after every accepted iterate.
    pub history: Vec<f64>,
}

impl SolveReport {
    pub fn final_value(&self) -> f64 {
        *self.history.last().expect("history holds the initial value")
    }
}

/// Minimizes `objective` over `u` where every consecutive block of `block`
/// entries is constrained to the ball of radius `bound`. `u` is projected on
/// entry and holds the result on return.
pub fn projected_gradient_descent<O: Objective + ?Sized>(
    objective: &O,
    u: &mut [f64],
    block: usize,
    bound: f64,
    settings: &SolverSettings,
) -> Result<SolveReport> {
    project_blocks(u, block, bound);
    let mut grad = vec![0.0; u.len()];
    let mut value = objective.value_and_gradient(u, &mut grad);
    if !value.is_finite() {
        return Err(FlockError::NonFiniteObjective {
            value,
            iteration: 0,
        });
    }
    let mut history = vec![value];
    let mut candidate = vec![0.0; u.len()];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < settings.max_iterations {
        // stationarity measure: ||u - P(u - grad)||
        for ((c, x), g) in candidate.iter_mut().zip(u.iter()).zip(&grad) {
            *c = x - g;
        }
        project_blocks(&mut candidate, block, bound);
        let stationarity = candidate
            .iter()
            .zip(u.iter())
            .map(|(c, x)| (c - x) * (c - x))
            .sum::<f64>()
            .sqrt();
        if stationarity < settings.tolerance {
            converged = true;
            break;
        }

        let mut step = settings.initial_step;
        let accepted = loop {
            for ((c, x), g) in candidate.iter_mut().zip(u.iter()).zip(&grad) {
                *c = x - step * g;
            }
            project_blocks(&mut candidate, block, bound);
            let trial = objective.value(&candidate);
            if !trial.is_finite() {
                return Err(FlockError::NonFiniteObjective {
                    value: trial,
                    iteration: iterations,
                });
            }
            let directional: f64 = candidate
                .iter()
                .zip(u.iter())
                .zip(&grad)
                .map(|((c, x), g)| g * (c - x))
                .sum();
            if trial <= value + settings.armijo * directional {
                break true;
            }
            step *= 0.5;
            if step < settings.min_step {
                break false;
            }
        };

        if !accepted {
            // no descent possible at machine precision
            converged = true;
            break;
        }
        u.copy_from_slice(&candidate);
        iterations += 1;
        value = objective.value_and_gradient(u, &mut grad);
        history.push(value);
    }

    Ok(SolveReport {
        iterations,
        converged,
        history,
    })
}
