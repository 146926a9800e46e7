//! Flocking performance measures over the sub-flocks of a configuration.
//!
//! A sub-flock is a connected component of the proximity net.

use crate::proximity::ProximityNet;
use crate::state::FlockConfiguration;
use crate::vecmath;

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// Components as ascending index lists, ordered by smallest member.
pub fn connected_components(net: &ProximityNet) -> Vec<Vec<usize>> {
    let n = net.n();
    let mut dsu = DisjointSet::new(n);
    for (i, j) in net.edges() {
        dsu.union(i, j);
    }
    let mut slot = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = dsu.find(i);
        if slot[root] == usize::MAX {
            slot[root] = components.len();
            components.push(Vec::new());
        }
        components[slot[root]].push(i);
    }
    components
}

/// Largest pairwise distance within any component of two or more agents;
/// `None` when every agent is isolated.
pub fn max_component_diameter(config: &FlockConfiguration, components: &[Vec<usize>]) -> Option<f64> {
    components
        .iter()
        .filter(|c| c.len() >= 2)
        .map(|c| {
            let mut best: f64 = 0.0;
            for (a, &i) in c.iter().enumerate() {
                for &j in &c[a + 1..] {
                    best = best.max(config.distance(i, j));
                }
            }
            best
        })
        .reduce(f64::max)
}

/// Mean over components of the per-agent squared deviation from the
/// component's mean velocity.
pub fn velocity_convergence(config: &FlockConfiguration, components: &[Vec<usize>]) -> f64 {
    if components.is_empty() {
        return 0.0;
    }
    let dim = config.dim();
    let mut mean = vec![0.0; dim];
    let total: f64 = components
        .iter()
        .map(|c| {
            mean.iter_mut().for_each(|m| *m = 0.0);
            for &i in c {
                vecmath::axpy(1.0, config.velocity(i), &mut mean);
            }
            let inv = 1.0 / c.len() as f64;
            mean.iter_mut().for_each(|m| *m *= inv);
            let spread: f64 = c
                .iter()
                .map(|&i| vecmath::dist_sq(config.velocity(i), &mean))
                .sum();
            spread / c.len() as f64
        })
        .sum();
    total / components.len() as f64
}

/// Mean over non-singleton components of the sample standard deviation of
/// each member's distance to its nearest fellow member; 0 if all agents are
/// isolated.
pub fn irregularity(config: &FlockConfiguration, components: &[Vec<usize>]) -> f64 {
    let groups: Vec<&Vec<usize>> = components.iter().filter(|c| c.len() >= 2).collect();
    if groups.is_empty() {
        return 0.0;
    }
    let total: f64 = groups
        .iter()
        .map(|c| {
            let nearest: Vec<f64> = c
                .iter()
                .map(|&i| {
                    c.iter()
                        .filter(|&&j| j != i)
                        .map(|&j| config.distance(i, j))
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            sample_std_dev(&nearest)
        })
        .sum();
    total / groups.len() as f64
}

fn sample_std_dev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (ss / (n - 1.0)).sqrt()
}

/// The four measures for one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRecord {
    pub num_components: usize,
    pub max_diameter: Option<f64>,
    pub velocity_convergence: f64,
    pub irregularity: f64,
}

impl MetricsRecord {
    pub fn evaluate(config: &FlockConfiguration, r: f64) -> MetricsRecord {
        let net = ProximityNet::build(config, r);
        let components = connected_components(&net);
        MetricsRecord {
            num_components: components.len(),
            max_diameter: max_component_diameter(config, &components),
            velocity_convergence: velocity_convergence(config, &components),
            irregularity: irregularity(config, &components),
        }
    }
}
