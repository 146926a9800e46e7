//! Potential-based flocking with σ-norm, bump function and uneven sigmoid.
//!
//! The acceleration of agent `i` is
//!
//! ```text
//! u_i = Σ_j φ_α(||x_j - x_i||_σ) n_ij + c Σ_j a_ij (v_j - v_i)
//! ```
//!
//! over neighbors `j` within radius `r`, with
//! `||z||_σ = (sqrt(1 + ε||z||²) - 1) / ε`, `n_ij = z / sqrt(1 + ε||z||²)`,
//! `φ_α(z) = ρ_h(z / r_σ) φ(z - d_σ)`, `a_ij = ρ_h(||x_j - x_i||_σ / r_σ)`,
//! `φ(z) = ((a + b) σ1(z + c0) + (a - b)) / 2`, `σ1(z) = z / sqrt(1 + z²)`
//! and `c0 = |a - b| / sqrt(4ab)`.

use serde::{Deserialize, Serialize};

use crate::error::{FlockError, Result};
use crate::proximity::neighbors_unchecked;
use crate::state::{FlockConfiguration, Vector};
use crate::vecmath;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OlfatiSaberParams {
    pub r: f64,
    pub d: f64,
    pub epsilon: f64,
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub c_alignment: f64,
}

impl Default for OlfatiSaberParams {
    fn default() -> Self {
        OlfatiSaberParams {
            r: 8.4,
            d: 7.0,
            epsilon: 0.1,
            a: 5.0,
            b: 5.0,
            h: 0.2,
            c_alignment: 1.0,
        }
    }
}

impl OlfatiSaberParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.a > 0.0
            && self.a <= self.b
            && self.h > 0.0
            && self.h < 1.0
            && self.epsilon > 0.0
            && self.d > 0.0
            && self.d < self.r
            && self.c_alignment >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(FlockError::InvalidParameter(format!(
                "olfati-saber parameters violate 0<a<=b, 0<h<1, eps>0, 0<d<r, c>=0: {self:?}"
            )))
        }
    }

    pub fn sigma_norm(&self, dist: f64) -> f64 {
        ((1.0 + self.epsilon * dist * dist).sqrt() - 1.0) / self.epsilon
    }

    pub fn bump(&self, z: f64) -> f64 {
        if (0.0..self.h).contains(&z) {
            1.0
        } else if (self.h..=1.0).contains(&z) {
            0.5 * (1.0 + (std::f64::consts::PI * (z - self.h) / (1.0 - self.h)).cos())
        } else {
            0.0
        }
    }

    pub fn sigmoid(&self, z: f64) -> f64 {
        let c = (self.a - self.b).abs() / (4.0 * self.a * self.b).sqrt();
        let s = z + c;
        0.5 * ((self.a + self.b) * s / (1.0 + s * s).sqrt() + (self.a - self.b))
    }

    /// Action function evaluated at a σ-distance.
    pub fn action(&self, z_sigma: f64) -> f64 {
        let r_sigma = self.sigma_norm(self.r);
        let d_sigma = self.sigma_norm(self.d);
        self.bump(z_sigma / r_sigma) * self.sigmoid(z_sigma - d_sigma)
    }
}

pub fn olfati_saber_accel(i: usize, view: &FlockConfiguration, params: &OlfatiSaberParams) -> Vector {
    let dim = view.dim();
    let mut out = vec![0.0; dim];
    let r_sigma = params.sigma_norm(params.r);
    let xi = view.position(i);
    let vi = view.velocity(i);
    let mut z = vec![0.0; dim];
    for j in neighbors_unchecked(view, i, params.r) {
        for ((zk, a), b) in z.iter_mut().zip(view.position(j)).zip(xi) {
            *zk = a - b;
        }
        let dist = vecmath::norm(&z);
        let z_sigma = params.sigma_norm(dist);
        // n_ij = z / sqrt(1 + eps ||z||^2); zero for coincident agents
        let gradient_weight = params.action(z_sigma) / (1.0 + params.epsilon * dist * dist).sqrt();
        vecmath::axpy(gradient_weight, &z, &mut out);
        let a_ij = params.bump(z_sigma / r_sigma);
        let w = params.c_alignment * a_ij;
        for ((o, vj), vik) in out.iter_mut().zip(view.velocity(j)).zip(vi) {
            *o += w * (vj - vik);
        }
    }
    out
}
