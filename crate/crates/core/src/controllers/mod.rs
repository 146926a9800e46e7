//! Rule-based and potential-based controllers.
//!
//! Each controller maps agent `i`'s view of the flock to an acceleration. In
//! the view, agent `i`'s own state is exact and every other agent's state
//! may carry sensing noise. Outputs are not clamped here; the dynamics step
//! enforces the acceleration bound.

mod olfati_saber;
mod reynolds;

pub use olfati_saber::{olfati_saber_accel, OlfatiSaberParams};
pub use reynolds::{
    reynolds_accel, reynolds_alignment, reynolds_cohesion, reynolds_separation, ReynoldsParams,
};

/// Floor on pair distances entering inverse-distance terms.
pub const EPSILON_DIST: f64 = 1e-6;
