//! Seeded random trees with a prescribed load `λ = Σ r_i / Σ W_j`.
//!
//! Internal nodes are attached one at a time to a random earlier internal
//! node that still has room under its drawn fan-out. Every internal node
//! without internal children gets one client; the remaining clients attach
//! to random internal nodes. Request weights are drawn uniformly and
//! rescaled (largest remainder) so that the total is exactly
//! `round(λ Σ W_j)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::num::Rational;
use crate::tree::{DistributionTree, Link, TreeBuilder};

/// Totals below this make the ±5% load tolerance unreachable by rounding.
pub const MIN_TARGET_REQUESTS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityMode {
    /// Every node has capacity `W` and storage cost 1.
    Homogeneous(u64),
    /// Capacities uniform in `[min, max]`, storage cost equal to capacity.
    Heterogeneous { min: u64, max: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub lambda: f64,
    /// Bounds on `s = |C| + |N|`.
    pub size_min: usize,
    pub size_max: usize,
    pub max_internal: Option<usize>,
    pub max_clients: Option<usize>,
    pub capacity: CapacityMode,
    /// Fan-out (internal children) drawn per node in this range.
    pub branching_min: usize,
    pub branching_max: usize,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            lambda: 0.5,
            size_min: 15,
            size_max: 400,
            max_internal: None,
            max_clients: None,
            capacity: CapacityMode::Homogeneous(100),
            branching_min: 1,
            branching_max: 4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("load must be a positive finite number, got {0}")]
    BadLambda(f64),
    #[error("no size in [{min}, {max}] admits a tree with these limits")]
    NoSize { min: usize, max: usize },
    #[error("bad capacity range")]
    BadCapacity,
    #[error("bad branching range")]
    BadBranching,
    #[error("load {lambda} gives only {target:.1} requests for the smallest trees; at least {MIN_TARGET_REQUESTS} are needed")]
    TooFewRequests { lambda: f64, target: f64 },
}

impl GeneratorParams {
    /// Admissible numbers of internal nodes for size `s`: at least one, at
    /// most as many as clients.
    fn internal_range(&self, s: usize) -> Option<(usize, usize)> {
        let hi = self.max_internal.map_or(s / 2, |m| m.min(s / 2));
        let lo = 1.max(s.div_ceil(4)).max(self.max_clients.map_or(0, |c| s.saturating_sub(c)));
        (lo <= hi).then_some((lo, hi))
    }

    fn sizes(&self) -> Vec<usize> {
        (self.size_min.max(2)..=self.size_max).filter(|&s| self.internal_range(s).is_some()).collect()
    }

    pub fn check(&self) -> Result<(), GeneratorError> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(GeneratorError::BadLambda(self.lambda));
        }
        if self.branching_min == 0 || self.branching_min > self.branching_max {
            return Err(GeneratorError::BadBranching);
        }
        let min_capacity = match self.capacity {
            CapacityMode::Homogeneous(w) if w > 0 => w,
            CapacityMode::Heterogeneous { min, max } if min > 0 && min <= max => min,
            _ => return Err(GeneratorError::BadCapacity),
        };
        let sizes = self.sizes();
        let Some(&smallest) = sizes.first() else {
            return Err(GeneratorError::NoSize { min: self.size_min, max: self.size_max });
        };
        let fewest = self.internal_range(smallest).expect("admissible").0;
        let target = self.lambda * (min_capacity * fewest as u64) as f64;
        if target < MIN_TARGET_REQUESTS {
            return Err(GeneratorError::TooFewRequests { lambda: self.lambda, target });
        }
        Ok(())
    }
}

pub fn generate_tree(params: &GeneratorParams) -> Result<DistributionTree, GeneratorError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let sizes = params.sizes();
    let s = *sizes.choose(&mut rng).expect("checked");
    let (lo, hi) = params.internal_range(s).expect("admissible");
    let n_int = rng.gen_range(lo..=hi);
    let n_cli = s - n_int;

    let mut parent = vec![usize::MAX; n_int];
    let mut room = Vec::with_capacity(n_int);
    let mut has_internal_child = vec![false; n_int];
    room.push(rng.gen_range(params.branching_min..=params.branching_max));
    for k in 1..n_int {
        let open: Vec<usize> = (0..k).filter(|&j| room[j] > 0).collect();
        let p = match open.choose(&mut rng) {
            Some(&p) => p,
            None => rng.gen_range(0..k),
        };
        room[p] = room[p].saturating_sub(1);
        parent[k] = p;
        has_internal_child[p] = true;
        room.push(rng.gen_range(params.branching_min..=params.branching_max));
    }
    let mut client_parent: Vec<usize> = (0..n_int).filter(|&j| !has_internal_child[j]).collect();
    while client_parent.len() < n_cli {
        client_parent.push(rng.gen_range(0..n_int));
    }

    let capacities: Vec<u64> = (0..n_int)
        .map(|_| match params.capacity {
            CapacityMode::Homogeneous(w) => w,
            CapacityMode::Heterogeneous { min, max } => rng.gen_range(min..=max),
        })
        .collect();
    let total_capacity: u64 = capacities.iter().sum();
    let target = (params.lambda * total_capacity as f64).round() as u64;
    let weights: Vec<u64> = (0..n_cli).map(|_| rng.gen_range(1..=100u64)).collect();
    let requests = apportion(target, &weights);

    let mut b = TreeBuilder::new();
    let cost = |w: u64| match params.capacity {
        CapacityMode::Homogeneous(_) => Rational::from_integer(1),
        CapacityMode::Heterogeneous { .. } => Rational::from_integer(w as i64),
    };
    let name = |j: usize| format!("n{j}");
    b.root(&name(0), capacities[0], cost(capacities[0])).expect("fresh builder");
    for k in 1..n_int {
        b.node(&name(k), capacities[k], cost(capacities[k]), &name(parent[k]), Link::default())
            .expect("parent declared first");
    }
    for (i, &p) in client_parent.iter().enumerate() {
        b.client(&format!("c{i}"), requests[i], None, &name(p), Link::default()).expect("parent declared first");
    }
    Ok(b.build().expect("generated trees are well formed"))
}

/// Splits `total` proportionally to `weights`, handing the remainder to
/// the largest fractional parts (lowest index first on ties).
fn apportion(total: u64, weights: &[u64]) -> Vec<u64> {
    let sum: u64 = weights.iter().sum();
    let mut out: Vec<u64> = weights.iter().map(|&w| total * w / sum).collect();
    let mut rest: Vec<(u64, usize)> = weights.iter().enumerate().map(|(k, &w)| ((total * w) % sum, k)).collect();
    rest.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let missing = total - out.iter().sum::<u64>();
    for &(_, k) in rest.iter().take(missing as usize) {
        out[k] += 1;
    }
    out
}
