//! Independent oracles shared by the integration tests and the acceptance run.

#![allow(dead_code)]

use flockbench::harness::{simulate_from, ExperimentConfig, ModelTag};
use flockbench::mpc::{
    local_snapshot, rollout_centralized, HorizonControls, HorizonProblem, MpcModel, MpcParams, Objective,
};
use flockbench::proximity::neighbors;
use flockbench::{FlockConfiguration, MotionLimits};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_config(rng: &mut ChaCha8Rng, n: usize, span: f64, vspan: f64) -> FlockConfiguration {
    let positions = (0..2 * n).map(|_| rng.gen_range(-span..span)).collect();
    let velocities = (0..2 * n).map(|_| rng.gen_range(-vspan..vspan)).collect();
    FlockConfiguration::new(2, positions, velocities).unwrap()
}

/// Fourth-order central difference of `f` at `u`.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, u: &[f64], h: f64) -> Vec<f64> {
    let mut x = u.to_vec();
    (0..u.len())
        .map(|k| {
            let at = |x: &mut Vec<f64>, s: f64| {
                x[k] = u[k] + s * h;
                f(x)
            };
            let g = (-at(&mut x, 2.0) + 8.0 * at(&mut x, 1.0) - 8.0 * at(&mut x, -1.0) + at(&mut x, -2.0))
                / (12.0 * h);
            x[k] = u[k];
            g
        })
        .collect()
}

/// Largest relative error over components whose oracle magnitude exceeds `floor`.
pub fn max_relative_error(analytic: &[f64], oracle: &[f64], floor: f64) -> f64 {
    analytic
        .iter()
        .zip(oracle)
        .filter(|(_, o)| o.abs() > floor)
        .map(|(a, o)| (a - o).abs() / o.abs())
        .fold(0.0, f64::max)
}

/// Half-width of the band around `r` in which a predicted pair distance
/// would let a finite-difference probe cross an edge boundary.
const EDGE_MARGIN: f64 = 1e-3;

fn near_edge_boundary(config: &FlockConfiguration, r: f64) -> bool {
    let n = config.n();
    (0..n).any(|i| (i + 1..n).any(|j| (config.distance(i, j) - r).abs() < EDGE_MARGIN))
}

/// One random gradient-check instance: returns the worst relative error.
pub fn gradient_instance(model: MpcModel, rng: &mut ChaCha8Rng) -> f64 {
    let params = MpcParams::default();
    let limits = MotionLimits::default();
    loop {
        let n = rng.gen_range(2..=6);
        let view = random_config(rng, n, 6.0, 3.0);
        let width = if model.is_centralized() { n } else { 1 };
        let mut u: Vec<f64> = (0..params.horizon * width * 2).map(|_| rng.gen_range(-0.7..0.7)).collect();
        for a in u.chunks_exact_mut(2) {
            let norm = (a[0] * a[0] + a[1] * a[1]).sqrt();
            if norm > limits.a_max {
                a.iter_mut().for_each(|x| *x *= limits.a_max / norm);
            }
        }
        let local = if model.is_centralized() {
            let controls = HorizonControls::from_flat(params.horizon, n, 2, u.clone()).unwrap();
            let traj = rollout_centralized(&view, &controls, &limits).unwrap();
            if traj.steps.iter().any(|x| near_edge_boundary(x, params.r)) {
                continue;
            }
            view.clone()
        } else {
            let i = rng.gen_range(0..n);
            let nbrs = neighbors(&view, i, params.r).unwrap();
            local_snapshot(&view, i, &nbrs).unwrap()
        };
        let problem = if model.is_centralized() {
            HorizonProblem::centralized(model, &local, &params, &limits)
        } else {
            HorizonProblem::distributed(model, &local, &params, &limits)
        };
        let mut grad = vec![0.0; u.len()];
        problem.value_and_gradient(&u, &mut grad);
        let oracle = fd_gradient(|x| problem.value(x), &u, 1e-4);
        return max_relative_error(&grad, &oracle, 1e-8);
    }
}

pub fn brute_adjacency(config: &FlockConfiguration, r: f64) -> Vec<Vec<bool>> {
    let n = config.n();
    let mut adj = vec![vec![false; n]; n];
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if i != j {
                let d2: f64 = config
                    .position(i)
                    .iter()
                    .zip(config.position(j))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                *cell = d2.sqrt() < r;
            }
        }
    }
    adj
}

/// Components via Floyd–Warshall transitive closure, ordered by smallest member.
pub fn brute_components(config: &FlockConfiguration, r: f64) -> Vec<Vec<usize>> {
    let n = config.n();
    let mut reach = brute_adjacency(config, r);
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if !seen[i] {
            let comp: Vec<usize> = (0..n).filter(|&j| reach[i][j]).collect();
            comp.iter().for_each(|&j| seen[j] = true);
            out.push(comp);
        }
    }
    out
}

/// Triangular-lattice patch with spacing `d`: rows of 4, 5, 4 agents.
pub fn hex_patch(d: f64, velocity: [f64; 2]) -> FlockConfiguration {
    let h = d * 3f64.sqrt() / 2.0;
    let mut pts = Vec::new();
    for (row, count, shift) in [(-1.0, 4, 0.5), (0.0, 5, 0.0), (1.0, 4, 0.5)] {
        for k in 0..count {
            pts.push([(k as f64 + shift) * d, row * h]);
        }
    }
    let n = pts.len();
    let positions = pts.into_iter().flatten().collect();
    let velocities = (0..n).flat_map(|_| velocity).collect();
    FlockConfiguration::new(2, positions, velocities).unwrap()
}

/// Golden-section minimizer on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (hi - g * (hi - lo), lo + g * (hi - lo));
    while hi - lo > 1e-10 {
        if f(a) < f(b) {
            hi = b;
        } else {
            lo = a;
        }
        a = hi - g * (hi - lo);
        b = lo + g * (hi - lo);
    }
    0.5 * (lo + hi)
}

/// Final distance of a two-agent run from rest at distance 6.
pub fn two_agent_final_distance(tag: ModelTag, steps: usize) -> f64 {
    let cfg = ExperimentConfig {
        n: 2,
        steps,
        ..Default::default()
    };
    let init = FlockConfiguration::from_points_2d(&[[0.0, 0.0], [6.0, 0.0]]).unwrap();
    let rec = simulate_from(&cfg, &cfg.model_spec(tag), 0, init).unwrap();
    rec.final_config.distance(0, 1)
}

/// Equilibrium spacing of `s² + k ω / s²` by direct numerical minimization.
pub fn df_equilibrium(k: f64, omega: f64) -> f64 {
    golden_min(|s| s * s + k * omega / (s * s), 0.5, 8.0)
}
