use serde::{Deserialize, Serialize};

use super::EPSILON_DIST;
use crate::error::{FlockError, Result};
use crate::proximity::neighbors_unchecked;
use crate::state::{FlockConfiguration, Vector};
use crate::vecmath;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct ReynoldsParams {
    pub r_c: f64,
    pub r_s: f64,
    pub r_al: f64,
    pub w_c: f64,
    pub w_s: f64,
    pub w_al: f64,
}

impl Default for ReynoldsParams {
    fn default() -> Self {
        ReynoldsParams {
            r_c: 9.0,
            r_s: 5.0,
            r_al: 7.5,
            w_c: 8.0,
            w_s: 12.0,
            w_al: 8.0,
        }
    }
}

impl ReynoldsParams {
    pub fn validate(&self) -> Result<()> {
        let radii = [self.r_c, self.r_s, self.r_al];
        let weights = [self.w_c, self.w_s, self.w_al];
        if radii.iter().any(|&r| !(r > 0.0)) || weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(FlockError::InvalidParameter(format!(
                "reynolds radii must be positive and weights nonnegative: {self:?}"
            )));
        }
        Ok(())
    }

    pub fn scaled_weights(&self, factor: f64) -> Self {
        ReynoldsParams {
            w_c: self.w_c * factor,
            w_s: self.w_s * factor,
            w_al: self.w_al * factor,
            ..*self
        }
    }
}

/// `w_al * (mean sensed neighbor velocity - own velocity)` over radius `r_al`.
pub fn reynolds_alignment(i: usize, view: &FlockConfiguration, params: &ReynoldsParams) -> Vector {
    let nbrs = neighbors_unchecked(view, i, params.r_al);
    let mut out = vec![0.0; view.dim()];
    if nbrs.is_empty() {
        return out;
    }
    for &j in &nbrs {
        vecmath::axpy(1.0, view.velocity(j), &mut out);
    }
    let inv = 1.0 / nbrs.len() as f64;
    for (o, v) in out.iter_mut().zip(view.velocity(i)) {
        *o = params.w_al * (*o * inv - v);
    }
    out
}

/// `w_c * (centroid of sensed neighbor positions - own position)` over radius `r_c`.
pub fn reynolds_cohesion(i: usize, view: &FlockConfiguration, params: &ReynoldsParams) -> Vector {
    let nbrs = neighbors_unchecked(view, i, params.r_c);
    let mut out = vec![0.0; view.dim()];
    if nbrs.is_empty() {
        return out;
    }
    for &j in &nbrs {
        vecmath::axpy(1.0, view.position(j), &mut out);
    }
    let inv = 1.0 / nbrs.len() as f64;
    for (o, x) in out.iter_mut().zip(view.position(i)) {
        *o = params.w_c * (*o * inv - x);
    }
    out
}

/// `w_s * mean_j (x_i - x_j) / ||x_i - x_j||^2` over radius `r_s`.
pub fn reynolds_separation(i: usize, view: &FlockConfiguration, params: &ReynoldsParams) -> Vector {
    let nbrs = neighbors_unchecked(view, i, params.r_s);
    let dim = view.dim();
    let mut out = vec![0.0; dim];
    if nbrs.is_empty() {
        return out;
    }
    let xi = view.position(i);
    let mut diff = vec![0.0; dim];
    for &j in &nbrs {
        for ((d, a), b) in diff.iter_mut().zip(xi).zip(view.position(j)) {
            *d = a - b;
        }
        let d_sq = vecmath::norm_sq(&diff).max(EPSILON_DIST * EPSILON_DIST);
        vecmath::axpy(1.0 / d_sq, &diff, &mut out);
    }
    let scale = params.w_s / nbrs.len() as f64;
    out.iter_mut().for_each(|o| *o *= scale);
    out
}

pub fn reynolds_accel(i: usize, view: &FlockConfiguration, params: &ReynoldsParams) -> Vector {
    let mut out = reynolds_alignment(i, view, params);
    vecmath::axpy(1.0, &reynolds_cohesion(i, view, params), &mut out);
    vecmath::axpy(1.0, &reynolds_separation(i, view, params), &mut out);
    out
}
