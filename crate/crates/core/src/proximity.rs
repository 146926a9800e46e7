//! Spatial neighborhoods, the proximity net and α-lattice predicates.
//!
//! Neighbor inclusion is strict everywhere: `j` is a neighbor of `i` iff
//! `j != i` and `||x_i - x_j|| < r`.

use crate::error::{FlockError, Result};
use crate::state::FlockConfiguration;
use crate::vecmath;

/// Indices of the agents strictly within radius `r` of agent `i`, ascending.
pub fn neighbors(config: &FlockConfiguration, i: usize, r: f64) -> Result<Vec<usize>> {
    config.check_index(i)?;
    check_radius(r)?;
    Ok(neighbors_unchecked(config, i, r))
}

pub(crate) fn neighbors_unchecked(config: &FlockConfiguration, i: usize, r: f64) -> Vec<usize> {
    let r_sq = r * r;
    let xi = config.position(i);
    (0..config.n())
        .filter(|&j| j != i && vecmath::dist_sq(xi, config.position(j)) < r_sq)
        .collect()
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 {
        Ok(())
    } else {
        Err(FlockError::InvalidParameter(format!(
            "radius must be positive, got {r}"
        )))
    }
}

/// The undirected graph linking agents closer than the interaction radius.
#[derive(Debug, Clone, PartialEq)]
pub struct ProximityNet {
    r: f64,
    adjacency: Vec<Vec<usize>>,
}

impl ProximityNet {
    pub fn build(config: &FlockConfiguration, r: f64) -> ProximityNet {
        let n = config.n();
        let r_sq = r * r;
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            let xi = config.position(i);
            for j in (i + 1)..n {
                if vecmath::dist_sq(xi, config.position(j)) < r_sq {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                }
            }
        }
        // pushes for j occur in increasing i, so each list is already sorted
        ProximityNet { r, adjacency }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    /// Sorted neighbor list of agent `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Unordered edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, adj)| adj.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }
}

pub fn proximity_net(config: &FlockConfiguration, r: f64) -> Result<ProximityNet> {
    check_radius(r)?;
    Ok(ProximityNet::build(config, r))
}

/// True iff every neighboring pair (radius `r`) has distance within `delta`
/// of `d`. `delta = 0` tests an exact α-lattice.
pub fn is_quasi_alpha_lattice(config: &FlockConfiguration, r: f64, d: f64, delta: f64) -> bool {
    let net = ProximityNet::build(config, r);
    let regular = net.edges().all(|(i, j)| (config.distance(i, j) - d).abs() <= delta);
    regular
}
