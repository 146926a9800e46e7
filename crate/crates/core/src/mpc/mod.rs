//! Receding-horizon flocking controllers.
//!
//! Four models share one rollout, objective and solver:
//!
//! | model                 | stage cost                       | sensing    |
//! |-----------------------|----------------------------------|------------|
//! | `LatticeCentralized`  | ordered-edge lattice deviation   | global     |
//! | `LatticeDistributed`  | lattice deviation of `N_i(k)`    | per agent  |
//! | `DfCentralized`       | cohesion + ω·separation, all     | global     |
//! | `DfDistributed`       | cohesion + ω·separation, `N_i(k)`| per agent  |
//!
//! The objective is `Σ_{t=1..T} stage(x(k+t|k)) + λ Σ_{t=0..T-1} ||a(k+t|k)||²`.
//! Gradients are computed by reverse-mode differentiation through the
//! rollout, with the proximity net of each predicted configuration held
//! fixed during a single gradient evaluation.

mod costs;
mod horizon;
mod solver;

pub use costs::{
    cost_df_centralized, cost_df_distributed, lattice_deviation_centralized,
    lattice_deviation_distributed,
};
pub use horizon::{
    local_snapshot, rollout_centralized, rollout_distributed, HorizonControls, PredictedTrajectory,
};
pub use solver::{projected_gradient_descent, Objective, SolveReport, SolverSettings};

use serde::{Deserialize, Serialize};

use crate::error::{FlockError, Result};
use crate::proximity::neighbors_unchecked;
use crate::state::{FlockConfiguration, MotionLimits};
use crate::vecmath;
use horizon::rollout_local;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MpcModel {
    LatticeCentralized,
    LatticeDistributed,
    DfCentralized,
    DfDistributed,
}

impl MpcModel {
    pub const ALL: [MpcModel; 4] = [
        MpcModel::LatticeCentralized,
        MpcModel::LatticeDistributed,
        MpcModel::DfCentralized,
        MpcModel::DfDistributed,
    ];

    pub fn is_centralized(self) -> bool {
        matches!(self, MpcModel::LatticeCentralized | MpcModel::DfCentralized)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MpcParams {
    pub horizon: usize,
    pub lambda: f64,
    pub r: f64,
    pub d: f64,
    pub omega: f64,
}

impl Default for MpcParams {
    fn default() -> Self {
        MpcParams {
            horizon: 3,
            lambda: 1.0,
            r: 8.4,
            d: 7.0,
            omega: 50.0,
        }
    }
}

impl MpcParams {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(FlockError::InvalidParameter("horizon must be >= 1".into()));
        }
        for (name, v) in [("lambda", self.lambda), ("r", self.r), ("d", self.d), ("omega", self.omega)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FlockError::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Stage cost of one predicted configuration.
///
/// For distributed models the configuration is compact: agent `i` at local
/// index 0 and its frozen neighbors at local indices `1..n`.
pub fn stage_cost(model: MpcModel, config: &FlockConfiguration, params: &MpcParams) -> f64 {
    match model {
        MpcModel::LatticeCentralized => lattice_deviation_centralized(config, params.r, params.d),
        MpcModel::DfCentralized => cost_df_centralized(config, params.r, params.omega),
        MpcModel::LatticeDistributed => {
            let nbrs: Vec<usize> = (1..config.n()).collect();
            lattice_deviation_distributed(0, config, &nbrs, params.d)
        }
        MpcModel::DfDistributed => {
            let nbrs: Vec<usize> = (1..config.n()).collect();
            cost_df_distributed(0, config, &nbrs, params.omega)
        }
    }
}

/// Gradient of [`stage_cost`] with respect to the controlled positions:
/// all agents for centralized models, local agent 0 for distributed ones.
fn stage_cost_grad(model: MpcModel, config: &FlockConfiguration, params: &MpcParams, grad: &mut [f64]) {
    match model {
        MpcModel::LatticeCentralized => {
            costs::lattice_deviation_centralized_grad(config, params.r, params.d, 1.0, grad)
        }
        MpcModel::DfCentralized => costs::cost_df_centralized_grad(config, params.r, params.omega, 1.0, grad),
        MpcModel::LatticeDistributed => {
            let nbrs: Vec<usize> = (1..config.n()).collect();
            costs::lattice_deviation_distributed_grad(0, config, &nbrs, params.d, 1.0, grad)
        }
        MpcModel::DfDistributed => {
            let nbrs: Vec<usize> = (1..config.n()).collect();
            costs::cost_df_distributed_grad(0, config, &nbrs, params.omega, 1.0, grad)
        }
    }
}

/// `Σ_{t=1..T} stage(x(k+t|k)) + λ Σ_t ||a(k+t|k)||²`.
pub fn mpc_objective(
    model: MpcModel,
    trajectory: &PredictedTrajectory,
    controls: &HorizonControls,
    params: &MpcParams,
) -> f64 {
    let stage: f64 = trajectory.steps[1..]
        .iter()
        .map(|x| stage_cost(model, x, params))
        .sum();
    stage + params.lambda * controls.squared_norm()
}

/// Horizon optimization problem over the controls of all agents (centralized)
/// or of local agent 0 (distributed). The decision vector uses the
/// [`HorizonControls`] layout.
pub struct HorizonProblem<'a> {
    model: MpcModel,
    init: &'a FlockConfiguration,
    params: &'a MpcParams,
    limits: &'a MotionLimits,
    controlled: usize,
}

impl<'a> HorizonProblem<'a> {
    pub fn centralized(
        model: MpcModel,
        init: &'a FlockConfiguration,
        params: &'a MpcParams,
        limits: &'a MotionLimits,
    ) -> Self {
        HorizonProblem {
            model,
            init,
            params,
            limits,
            controlled: init.n(),
        }
    }

    /// `local` must be a compact snapshot (see [`local_snapshot`]).
    pub fn distributed(
        model: MpcModel,
        local: &'a FlockConfiguration,
        params: &'a MpcParams,
        limits: &'a MotionLimits,
    ) -> Self {
        HorizonProblem {
            model,
            init: local,
            params,
            limits,
            controlled: 1,
        }
    }

    pub fn num_variables(&self) -> usize {
        self.params.horizon * self.controlled * self.init.dim()
    }

    fn rollout(&self, u: &[f64]) -> PredictedTrajectory {
        let horizon = self.params.horizon;
        if self.controlled == 1 && !self.model.is_centralized() {
            rollout_local(self.init, u, horizon, self.limits)
        } else {
            let controls =
                HorizonControls::from_flat(horizon, self.controlled, self.init.dim(), u.to_vec())
                    .expect("decision vector length");
            rollout_centralized(self.init, &controls, self.limits).expect("consistent controls")
        }
    }

    fn evaluate(&self, u: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let traj = self.rollout(u);
        let stage: f64 = traj.steps[1..]
            .iter()
            .map(|x| stage_cost(self.model, x, self.params))
            .sum();
        let value = stage + self.params.lambda * vecmath::norm_sq(u);
        let Some(grad) = grad else {
            return value;
        };

        let dim = self.init.dim();
        let width = self.controlled * dim;
        let dt = self.limits.dt;
        let mut gx = vec![0.0; width];
        let mut gv = vec![0.0; width];
        let mut gpre = vec![0.0; width];
        let mut pre = vec![0.0; width];
        for t in (1..=self.params.horizon).rev() {
            stage_cost_grad(self.model, &traj.steps[t], self.params, &mut gx);
            // v_t = clamp(v_{t-1} + dt a_{t-1}); x_t = x_{t-1} + dt v_{t-1}
            let a = &u[(t - 1) * width..t * width];
            let v_prev = &traj.steps[t - 1].velocities()[..width];
            for ((p, v), ak) in pre.iter_mut().zip(v_prev).zip(a) {
                *p = v + dt * ak;
            }
            gpre.copy_from_slice(&gv);
            for (g, p) in gpre.chunks_exact_mut(dim).zip(pre.chunks_exact(dim)) {
                vecmath::project_ball_adjoint(p, self.limits.v_max, g);
            }
            let ga = &mut grad[(t - 1) * width..t * width];
            for ((g, gp), ak) in ga.iter_mut().zip(&gpre).zip(a) {
                *g = dt * gp + 2.0 * self.params.lambda * ak;
            }
            for ((v, gp), x) in gv.iter_mut().zip(&gpre).zip(&gx) {
                *v = gp + dt * x;
            }
        }
        value
    }
}

impl Objective for HorizonProblem<'_> {
    fn value(&self, u: &[f64]) -> f64 {
        self.evaluate(u, None)
    }

    fn value_and_gradient(&self, u: &[f64], grad: &mut [f64]) -> f64 {
        self.evaluate(u, Some(grad))
    }
}

#[derive(Debug, Clone)]
pub struct MpcSolution {
    pub controls: HorizonControls,
    pub report: SolveReport,
}

impl MpcSolution {
    /// Accelerations to apply now; the rest of the sequence is discarded.
    pub fn first_step(&self) -> &[f64] {
        self.controls.step(0)
    }
}

fn check_warm(warm: &HorizonControls, horizon: usize, agents: usize, dim: usize) -> Result<()> {
    if warm.horizon() != horizon || warm.agents() != agents || warm.dim() != dim {
        return Err(FlockError::LengthMismatch {
            what: "warm start",
            expected: horizon * agents * dim,
            actual: warm.as_slice().len(),
        });
    }
    Ok(())
}

/// Solves one centralized horizon problem from a global (noisy) view.
pub fn solve_centralized(
    model: MpcModel,
    view: &FlockConfiguration,
    params: &MpcParams,
    limits: &MotionLimits,
    settings: &SolverSettings,
    warm_start: Option<&HorizonControls>,
) -> Result<MpcSolution> {
    if !model.is_centralized() {
        return Err(FlockError::InvalidParameter(format!(
            "{model:?} is not a centralized model"
        )));
    }
    let (horizon, n, dim) = (params.horizon, view.n(), view.dim());
    let mut controls = match warm_start {
        Some(w) => {
            check_warm(w, horizon, n, dim)?;
            w.clone()
        }
        None => HorizonControls::zeros(horizon, n, dim),
    };
    let problem = HorizonProblem::centralized(model, view, params, limits);
    let report = projected_gradient_descent(&problem, controls.as_mut_slice(), dim, limits.a_max, settings)?;
    Ok(MpcSolution { controls, report })
}

/// Solves agent `i`'s horizon problem from its own (noisy) view. The neighbor
/// set is computed once from the view and frozen over the horizon.
pub fn solve_distributed(
    model: MpcModel,
    i: usize,
    view: &FlockConfiguration,
    params: &MpcParams,
    limits: &MotionLimits,
    settings: &SolverSettings,
    warm_start: Option<&HorizonControls>,
) -> Result<MpcSolution> {
    if model.is_centralized() {
        return Err(FlockError::InvalidParameter(format!(
            "{model:?} is not a distributed model"
        )));
    }
    view.check_index(i)?;
    let (horizon, dim) = (params.horizon, view.dim());
    let mut controls = match warm_start {
        Some(w) => {
            check_warm(w, horizon, 1, dim)?;
            w.clone()
        }
        None => HorizonControls::zeros(horizon, 1, dim),
    };
    let nbrs = neighbors_unchecked(view, i, params.r);
    let local = local_snapshot(view, i, &nbrs)?;
    let problem = HorizonProblem::distributed(model, &local, params, limits);
    let report = projected_gradient_descent(&problem, controls.as_mut_slice(), dim, limits.a_max, settings)?;
    Ok(MpcSolution { controls, report })
}

/// Receding-horizon controller with warm-start memory across steps.
#[derive(Debug, Clone)]
pub struct MpcController {
    pub model: MpcModel,
    pub params: MpcParams,
    pub limits: MotionLimits,
    pub settings: SolverSettings,
    warm: Vec<Option<HorizonControls>>,
}

impl MpcController {
    pub fn new(model: MpcModel, params: MpcParams, limits: MotionLimits, settings: SolverSettings) -> Self {
        MpcController {
            model,
            params,
            limits,
            settings,
            warm: Vec::new(),
        }
    }

    /// Clears warm-start state.
    pub fn reset(&mut self) {
        self.warm.clear();
    }

    /// One centralized control step; returns flat `n * dim` accelerations.
    pub fn step_centralized(&mut self, view: &FlockConfiguration) -> Result<Vec<f64>> {
        self.warm.resize(1, None);
        let sol = solve_centralized(
            self.model,
            view,
            &self.params,
            &self.limits,
            &self.settings,
            self.warm[0].as_ref(),
        )?;
        let out = sol.first_step().to_vec();
        self.warm[0] = Some(sol.controls.shifted());
        Ok(out)
    }

    /// One distributed control step: agent `i` solves against `views[i]`, all
    /// from the same snapshot, and accelerations are applied together.
    pub fn step_distributed(&mut self, views: &[FlockConfiguration], parallel: bool) -> Result<Vec<f64>> {
        let n = views.len();
        self.warm.resize(n, None);
        let solve = |i: usize| {
            solve_distributed(
                self.model,
                i,
                &views[i],
                &self.params,
                &self.limits,
                &self.settings,
                self.warm[i].as_ref(),
            )
        };
        let solutions: Vec<MpcSolution> = if parallel {
            par_map(n, solve)?
        } else {
            (0..n).map(solve).collect::<Result<_>>()?
        };
        let dim = views.first().map_or(0, FlockConfiguration::dim);
        let mut out = Vec::with_capacity(n * dim);
        for (i, sol) in solutions.into_iter().enumerate() {
            out.extend_from_slice(sol.first_step());
            self.warm[i] = Some(sol.controls.shifted());
        }
        Ok(out)
    }
}

#[cfg(feature = "parallel")]
fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T>(n: usize, f: impl Fn(usize) -> Result<T>) -> Result<Vec<T>> {
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(s: f64) -> FlockConfiguration {
        FlockConfiguration::from_points_2d(&[[0.0, 0.0], [s, 0.0]]).unwrap()
    }

    #[test]
    fn objective_of_static_zero_control_is_t_times_stage() {
        let params = MpcParams::default();
        let limits = MotionLimits::default();
        let c = pair(5.0);
        let controls = HorizonControls::zeros(3, 2, 2);
        let traj = rollout_centralized(&c, &controls, &limits).unwrap();
        for model in [MpcModel::LatticeCentralized, MpcModel::DfCentralized] {
            let j = mpc_objective(model, &traj, &controls, &params);
            assert!((j - 3.0 * stage_cost(model, &c, &params)).abs() < 1e-12);
        }
    }

    #[test]
    fn objective_on_lattice_is_pure_control_penalty() {
        let params = MpcParams::default();
        let limits = MotionLimits::default();
        let c = pair(7.0);
        // symmetric accelerations applied only at the last step leave positions unchanged
        let mut controls = HorizonControls::zeros(3, 2, 2);
        controls.get_mut(2, 0)[1] = 0.5;
        controls.get_mut(2, 1)[0] = -0.25;
        let traj = rollout_centralized(&c, &controls, &limits).unwrap();
        let j = mpc_objective(MpcModel::LatticeCentralized, &traj, &controls, &params);
        assert!((j - (0.25 + 0.0625)).abs() < 1e-12);
        let doubled = MpcParams {
            lambda: 2.0,
            ..params
        };
        let j2 = mpc_objective(MpcModel::LatticeCentralized, &traj, &controls, &doubled);
        assert!((j2 - 2.0 * j).abs() < 1e-12);
    }

    #[test]
    fn isolated_agent_needs_no_control() {
        let params = MpcParams::default();
        let limits = MotionLimits::default();
        let settings = SolverSettings::default();
        let c = FlockConfiguration::new(2, vec![0.0, 0.0], vec![1.0, 0.5]).unwrap();
        for model in MpcModel::ALL {
            let sol = if model.is_centralized() {
                solve_centralized(model, &c, &params, &limits, &settings, None).unwrap()
            } else {
                solve_distributed(model, 0, &c, &params, &limits, &settings, None).unwrap()
            };
            assert!(vecmath::norm(sol.first_step()) < 1e-12, "{model:?}");
        }
    }

    #[test]
    fn df_pair_at_equilibrium_stays_put() {
        let params = MpcParams::default();
        let limits = MotionLimits::default();
        let c = pair(params.omega.powf(0.25));
        let sol = solve_distributed(
            MpcModel::DfDistributed,
            0,
            &c,
            &params,
            &limits,
            &SolverSettings::default(),
            None,
        )
        .unwrap();
        assert!(vecmath::norm(sol.first_step()) < 1e-3);
    }

    #[test]
    fn df_close_pair_repels() {
        let params = MpcParams::default();
        let limits = MotionLimits::default();
        let c = pair(2.0);
        let settings = SolverSettings::default();
        let a0 = solve_distributed(MpcModel::DfDistributed, 0, &c, &params, &limits, &settings, None).unwrap();
        let a1 = solve_distributed(MpcModel::DfDistributed, 1, &c, &params, &limits, &settings, None).unwrap();
        assert!(a0.first_step()[0] < 0.0);
        assert!(a1.first_step()[0] > 0.0);
        let cen = solve_centralized(MpcModel::DfCentralized, &c, &params, &limits, &settings, None).unwrap();
        assert!(cen.first_step()[0] < 0.0 && cen.first_step()[2] > 0.0);
    }

    #[test]
    fn wrong_model_kind_rejected() {
        let params = MpcParams::default();
        let limits = MotionLimits::default();
        let settings = SolverSettings::default();
        let c = pair(3.0);
        assert!(solve_centralized(MpcModel::DfDistributed, &c, &params, &limits, &settings, None).is_err());
        assert!(solve_distributed(MpcModel::DfCentralized, 0, &c, &params, &limits, &settings, None).is_err());
    }

    #[test]
    fn solutions_are_feasible_and_descend() {
        let params = MpcParams::default();
        let limits = MotionLimits::default();
        let settings = SolverSettings::default();
        let c = FlockConfiguration::new(
            2,
            vec![0.0, 0.0, 1.5, 0.5, -1.0, 2.0, 6.0, 1.0],
            vec![0.5, 0.0, -1.0, 0.5, 2.0, 2.0, 0.0, -1.0],
        )
        .unwrap();
        for model in MpcModel::ALL {
            let sol = if model.is_centralized() {
                solve_centralized(model, &c, &params, &limits, &settings, None).unwrap()
            } else {
                solve_distributed(model, 1, &c, &params, &limits, &settings, None).unwrap()
            };
            assert!(sol.controls.is_feasible(limits.a_max, 1e-9));
            for w in sol.report.history.windows(2) {
                assert!(w[1] <= w[0], "{model:?}: {} > {}", w[1], w[0]);
            }
        }
    }
}
