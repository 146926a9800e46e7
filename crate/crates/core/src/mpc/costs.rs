//! Stage costs of the lattice-based and declarative MPC models, with their
//! gradients with respect to agent positions.
//!
//! Centralized costs sum over the proximity net of the configuration they are
//! evaluated on, counting each unordered pair once per orientation. Distributed
//! costs take a neighbor set fixed by the caller.

use crate::controllers::EPSILON_DIST;
use crate::proximity::ProximityNet;
use crate::state::FlockConfiguration;
use crate::vecmath;

/// `||x_ji - d x_ji / ||x_ji|| ||²` with the norm in the denominator floored.
#[inline]
fn lattice_pair(diff: &[f64], d: f64) -> f64 {
    let rho_sq = vecmath::norm_sq(diff);
    let rho = rho_sq.sqrt();
    if rho >= EPSILON_DIST {
        (rho - d) * (rho - d)
    } else {
        let s = 1.0 - d / EPSILON_DIST;
        rho_sq * s * s
    }
}

/// Gradient of [`lattice_pair`] with respect to `diff`, scaled by `scale`
/// and accumulated into `out`.
#[inline]
fn lattice_pair_grad(diff: &[f64], d: f64, scale: f64, out: &mut [f64]) {
    let rho = vecmath::norm(diff);
    let coeff = if rho >= EPSILON_DIST {
        2.0 * (rho - d) / rho
    } else {
        let s = 1.0 - d / EPSILON_DIST;
        2.0 * s * s
    };
    vecmath::axpy(scale * coeff, diff, out);
}

#[inline]
fn inverse_sq(diff: &[f64]) -> f64 {
    1.0 / vecmath::norm_sq(diff).max(EPSILON_DIST * EPSILON_DIST)
}

#[inline]
fn inverse_sq_grad(diff: &[f64], scale: f64, out: &mut [f64]) {
    let rho_sq = vecmath::norm_sq(diff);
    if rho_sq >= EPSILON_DIST * EPSILON_DIST {
        vecmath::axpy(-2.0 * scale / (rho_sq * rho_sq), diff, out);
    }
}

fn diff_into(out: &mut [f64], a: &[f64], b: &[f64]) {
    for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
        *o = x - y;
    }
}

/// Total deviation of neighbor distances from `d` over the ordered edge set.
pub fn lattice_deviation_centralized(config: &FlockConfiguration, r: f64, d: f64) -> f64 {
    let net = ProximityNet::build(config, r);
    let mut diff = vec![0.0; config.dim()];
    net.edges()
        .map(|(i, j)| {
            diff_into(&mut diff, config.position(j), config.position(i));
            2.0 * lattice_pair(&diff, d)
        })
        .sum()
}

pub(crate) fn lattice_deviation_centralized_grad(
    config: &FlockConfiguration,
    r: f64,
    d: f64,
    scale: f64,
    grad: &mut [f64],
) {
    let dim = config.dim();
    let net = ProximityNet::build(config, r);
    let mut diff = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    for (i, j) in net.edges() {
        diff_into(&mut diff, config.position(j), config.position(i));
        g.iter_mut().for_each(|x| *x = 0.0);
        lattice_pair_grad(&diff, d, 2.0 * scale, &mut g);
        vecmath::axpy(1.0, &g, &mut grad[j * dim..(j + 1) * dim]);
        vecmath::axpy(-1.0, &g, &mut grad[i * dim..(i + 1) * dim]);
    }
}

/// Deviation of agent `i`'s fixed neighborhood from an α-lattice of scale `d`.
pub fn lattice_deviation_distributed(
    i: usize,
    config: &FlockConfiguration,
    neighbor_set: &[usize],
    d: f64,
) -> f64 {
    let mut diff = vec![0.0; config.dim()];
    neighbor_set
        .iter()
        .map(|&j| {
            diff_into(&mut diff, config.position(j), config.position(i));
            lattice_pair(&diff, d)
        })
        .sum()
}

/// Gradient of [`lattice_deviation_distributed`] with respect to `x_i` only.
pub(crate) fn lattice_deviation_distributed_grad(
    i: usize,
    config: &FlockConfiguration,
    neighbor_set: &[usize],
    d: f64,
    scale: f64,
    grad_i: &mut [f64],
) {
    let mut diff = vec![0.0; config.dim()];
    for &j in neighbor_set {
        // d/dx_i of f(x_j - x_i) = -f'(x_ji)
        diff_into(&mut diff, config.position(j), config.position(i));
        lattice_pair_grad(&diff, d, -scale, grad_i);
    }
}

/// Declarative cost: mean squared pairwise distance plus `omega` times the
/// inverse squared distances over the ordered edge set.
pub fn cost_df_centralized(config: &FlockConfiguration, r: f64, omega: f64) -> f64 {
    let n = config.n();
    if n < 2 {
        return 0.0;
    }
    let dim = config.dim();
    let net = ProximityNet::build(config, r);
    let mut cohesion = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            cohesion += vecmath::dist_sq(config.position(i), config.position(j));
        }
    }
    let mut diff = vec![0.0; dim];
    let separation: f64 = net
        .edges()
        .map(|(i, j)| {
            diff_into(&mut diff, config.position(i), config.position(j));
            2.0 * inverse_sq(&diff)
        })
        .sum();
    2.0 / (n * (n - 1)) as f64 * cohesion + omega * separation
}

pub(crate) fn cost_df_centralized_grad(
    config: &FlockConfiguration,
    r: f64,
    omega: f64,
    scale: f64,
    grad: &mut [f64],
) {
    let n = config.n();
    if n < 2 {
        return;
    }
    let dim = config.dim();
    // Σ_{i<j} ||x_i - x_j||² has gradient 2 (n x_i - Σ_j x_j) at agent i.
    let mut centroid_sum = vec![0.0; dim];
    for i in 0..n {
        vecmath::axpy(1.0, config.position(i), &mut centroid_sum);
    }
    let coh = scale * 2.0 / (n * (n - 1)) as f64;
    for i in 0..n {
        let g = &mut grad[i * dim..(i + 1) * dim];
        for ((gk, xk), sk) in g.iter_mut().zip(config.position(i)).zip(&centroid_sum) {
            *gk += coh * 2.0 * (n as f64 * xk - sk);
        }
    }
    let net = ProximityNet::build(config, r);
    let mut diff = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    for (i, j) in net.edges() {
        diff_into(&mut diff, config.position(i), config.position(j));
        g.iter_mut().for_each(|x| *x = 0.0);
        inverse_sq_grad(&diff, 2.0 * omega * scale, &mut g);
        vecmath::axpy(1.0, &g, &mut grad[i * dim..(i + 1) * dim]);
        vecmath::axpy(-1.0, &g, &mut grad[j * dim..(j + 1) * dim]);
    }
}

/// Declarative cost restricted to agent `i`'s fixed neighbor set; zero when
/// the set is empty.
pub fn cost_df_distributed(
    i: usize,
    config: &FlockConfiguration,
    neighbor_set: &[usize],
    omega: f64,
) -> f64 {
    if neighbor_set.is_empty() {
        return 0.0;
    }
    let mut diff = vec![0.0; config.dim()];
    let mut cohesion = 0.0;
    let mut separation = 0.0;
    for &j in neighbor_set {
        diff_into(&mut diff, config.position(i), config.position(j));
        cohesion += vecmath::norm_sq(&diff);
        separation += inverse_sq(&diff);
    }
    cohesion / neighbor_set.len() as f64 + omega * separation
}

/// Gradient of [`cost_df_distributed`] with respect to `x_i` only.
pub(crate) fn cost_df_distributed_grad(
    i: usize,
    config: &FlockConfiguration,
    neighbor_set: &[usize],
    omega: f64,
    scale: f64,
    grad_i: &mut [f64],
) {
    if neighbor_set.is_empty() {
        return;
    }
    let mut diff = vec![0.0; config.dim()];
    let coh = 2.0 * scale / neighbor_set.len() as f64;
    for &j in neighbor_set {
        diff_into(&mut diff, config.position(i), config.position(j));
        vecmath::axpy(coh, &diff, grad_i);
        inverse_sq_grad(&diff, omega * scale, grad_i);
    }
}
