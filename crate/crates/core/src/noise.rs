//! Deterministic random streams and the additive Gaussian sensing model.
//!
//! Streams are ChaCha8 generators. Gaussian deviates come from the
//! Box–Muller transform on two uniform deviates `u1 ∈ (0, 1]`, `u2 ∈ [0, 1)`:
//! `z0 = sqrt(-2 ln u1) cos(2π u2)` is returned first and
//! `z1 = sqrt(-2 ln u1) sin(2π u2)` is cached for the following call.
//!
//! Noise is drawn in a fixed order: agent index ascending, all position
//! components before all velocity components, component index ascending.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FlockError, Result};
use crate::state::FlockConfiguration;

/// SplitMix64 finalizer, used to spread user seeds over the state space.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for run `run_id` of an experiment with base seed `base`:
/// `splitmix64(base ^ splitmix64(run_id))`.
pub fn derive_run_seed(base: u64, run_id: u64) -> u64 {
    splitmix64(base ^ splitmix64(run_id))
}

/// Stream ids used within one run.
pub const INIT_STREAM: u64 = 0;
pub const SENSING_STREAM: u64 = 1;

#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl RandomStream {
    pub fn from_seed(seed: u64) -> Self {
        RandomStream::with_stream(seed, 0)
    }

    /// Independent sub-stream `stream` of the generator keyed by `seed`.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        for (k, chunk) in key.chunks_exact_mut(8).enumerate() {
            chunk.copy_from_slice(&splitmix64(seed.wrapping_add(k as u64)).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream);
        RandomStream { rng, spare: None }
    }

    /// Uniform deviate on `[lo, hi)`; returns `lo` when `lo == hi`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u: f64 = self.rng.gen();
        lo + (hi - lo) * u
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.rng.gen::<f64>();
        let u2: f64 = self.rng.gen();
        let radius = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(radius * theta.sin());
        radius * theta.cos()
    }

    pub fn normal(&mut self, sigma: f64) -> f64 {
        sigma * self.standard_normal()
    }
}

/// Standard deviations of position and velocity sensing noise.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseSpec {
    pub sigma_x: f64,
    pub sigma_v: f64,
}

impl NoiseSpec {
    pub const NONE: NoiseSpec = NoiseSpec {
        sigma_x: 0.0,
        sigma_v: 0.0,
    };

    pub fn new(sigma_x: f64, sigma_v: f64) -> Result<Self> {
        let spec = NoiseSpec { sigma_x, sigma_v };
        spec.validate()?;
        Ok(spec)
    }

    /// Noise level `i` of the sweep: `σx = 0.2 i`, `σv = 0.1 i`.
    pub fn level(i: u32) -> Self {
        NoiseSpec {
            sigma_x: 0.2 * i as f64,
            sigma_v: 0.1 * i as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma_x >= 0.0 && self.sigma_v >= 0.0 {
            Ok(())
        } else {
            Err(FlockError::InvalidParameter(format!(
                "noise standard deviations must be nonnegative, got {:?}",
                self
            )))
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.sigma_x == 0.0 && self.sigma_v == 0.0
    }
}

fn perturb_agent(view: &mut FlockConfiguration, j: usize, noise: &NoiseSpec, rng: &mut RandomStream) {
    for x in view.position_mut(j) {
        *x += rng.normal(noise.sigma_x);
    }
    for v in view.velocity_mut(j) {
        *v += rng.normal(noise.sigma_v);
    }
}

/// Shared noisy measurement of the whole flock (centralized sensing).
pub fn sense_global(
    config: &FlockConfiguration,
    noise: &NoiseSpec,
    rng: &mut RandomStream,
) -> FlockConfiguration {
    let mut view = config.clone();
    if noise.is_noiseless() {
        return view;
    }
    for j in 0..config.n() {
        perturb_agent(&mut view, j, noise, rng);
    }
    view
}

/// Noisy measurement as seen by agent `i`: its own state is exact.
pub fn sense_local(
    config: &FlockConfiguration,
    i: usize,
    noise: &NoiseSpec,
    rng: &mut RandomStream,
) -> Result<FlockConfiguration> {
    config.check_index(i)?;
    let mut view = config.clone();
    if noise.is_noiseless() {
        return Ok(view);
    }
    for j in (0..config.n()).filter(|&j| j != i) {
        perturb_agent(&mut view, j, noise, rng);
    }
    Ok(view)
}

/// One independent local view per observer, drawn in observer order.
pub fn sense_all_local(
    config: &FlockConfiguration,
    noise: &NoiseSpec,
    rng: &mut RandomStream,
) -> Vec<FlockConfiguration> {
    (0..config.n())
        .map(|i| sense_local(config, i, noise, rng).expect("observer index in range"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_config() -> FlockConfiguration {
        FlockConfiguration::new(
            2,
            vec![0.0, 1.0, 5.0, -2.0, 3.0, 3.0],
            vec![1.0, 0.5, 0.0, 0.0, 1.5, 1.5],
        )
        .unwrap()
    }

    #[test]
    fn noiseless_sensing_is_identity() {
        let c = sample_config();
        let mut rng = RandomStream::from_seed(7);
        assert_eq!(sense_global(&c, &NoiseSpec::NONE, &mut rng), c);
        for i in 0..c.n() {
            assert_eq!(sense_local(&c, i, &NoiseSpec::NONE, &mut rng).unwrap(), c);
        }
    }

    #[test]
    fn empirical_std_dev_matches_sigma() {
        let n = 5000;
        let c = FlockConfiguration::new(2, vec![0.0; 2 * n], vec![0.0; 2 * n]).unwrap();
        let noise = NoiseSpec::new(0.2, 0.1).unwrap();
        let view = sense_global(&c, &noise, &mut RandomStream::from_seed(11));
        for (buf, sigma) in [(view.positions(), 0.2), (view.velocities(), 0.1)] {
            for k in 0..2 {
                let xs: Vec<f64> = buf.iter().skip(k).step_by(2).copied().collect();
                let mean = xs.iter().sum::<f64>() / xs.len() as f64;
                let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
                let sd = var.sqrt();
                assert!((sd - sigma).abs() < 0.05 * sigma, "sd {sd} vs {sigma}");
            }
        }
    }

    #[test]
    fn same_seed_same_output() {
        let c = sample_config();
        let noise = NoiseSpec::level(3);
        let a = sense_global(&c, &noise, &mut RandomStream::from_seed(42));
        let b = sense_global(&c, &noise, &mut RandomStream::from_seed(42));
        assert_eq!(a, b);
        let d = sense_global(&c, &noise, &mut RandomStream::from_seed(43));
        assert_ne!(a, d);
    }

    #[test]
    fn local_view_keeps_observer_exact() {
        let c = sample_config();
        let noise = NoiseSpec::level(1);
        let mut rng = RandomStream::from_seed(3);
        let view = sense_local(&c, 0, &noise, &mut rng).unwrap();
        assert_eq!(view.position(0), c.position(0));
        assert_eq!(view.velocity(0), c.velocity(0));
        assert_ne!(view.position(1), c.position(1));
        assert!(sense_local(&c, 3, &noise, &mut rng).is_err());
    }

    #[test]
    fn observers_see_independent_perturbations() {
        let c = sample_config();
        let noise = NoiseSpec::level(1);
        let views = sense_all_local(&c, &noise, &mut RandomStream::from_seed(5));
        // agent 2 as perceived by observers 0 and 1
        assert_ne!(views[0].position(2), views[1].position(2));
        assert_eq!(views[1].position(1), c.position(1));
    }

    #[test]
    fn level_parameters() {
        let l = NoiseSpec::level(10);
        assert!((l.sigma_x - 2.0).abs() < 1e-15);
        assert!((l.sigma_v - 1.0).abs() < 1e-15);
        assert!(NoiseSpec::new(-0.1, 0.0).is_err());
    }

    #[test]
    fn run_seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|j| derive_run_seed(1, j)).collect();
        assert_eq!(seeds.len(), 1000);
    }

    #[test]
    fn streams_are_independent() {
        let mut a = RandomStream::with_stream(9, INIT_STREAM);
        let mut b = RandomStream::with_stream(9, SENSING_STREAM);
        let xa: Vec<f64> = (0..4).map(|_| a.uniform(0.0, 1.0)).collect();
        let xb: Vec<f64> = (0..4).map(|_| b.uniform(0.0, 1.0)).collect();
        assert_ne!(xa, xb);
    }
}
