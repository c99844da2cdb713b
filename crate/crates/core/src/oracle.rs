//! Exact exponential-time solvers for small trees.
//!
//! Replica subsets are enumerated by increasing cost (then size, then
//! bitmask) and the first feasible subset is optimal. Only capacity
//! constraints are considered.

use std::collections::HashSet;

use num_traits::Zero;
use thiserror::Error;

use crate::num::Rational;
use crate::optimal::greedy_absorb;
use crate::solution::{Assignment, Placement};
use crate::tree::{DistributionTree, NodeIdx};
use crate::validate::Policy;

pub const DEFAULT_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Optimal { cost: Rational, placement: Placement, assignment: Assignment },
    Infeasible,
}

impl OracleOutcome {
    pub fn cost(&self) -> Option<Rational> {
        match self {
            OracleOutcome::Optimal { cost, .. } => Some(*cost),
            OracleOutcome::Infeasible => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, OracleOutcome::Optimal { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{what} count {count} exceeds the oracle cap {cap}")]
    CapExceeded { what: &'static str, count: usize, cap: usize },
}

pub fn exact_closest(tree: &DistributionTree) -> Result<OracleOutcome, OracleError> {
    exact(tree, Policy::Closest, DEFAULT_CAP)
}

pub fn exact_upwards(tree: &DistributionTree) -> Result<OracleOutcome, OracleError> {
    exact(tree, Policy::Upwards, DEFAULT_CAP)
}

pub fn exact_multiple(tree: &DistributionTree) -> Result<OracleOutcome, OracleError> {
    exact(tree, Policy::Multiple, DEFAULT_CAP)
}

/// Cheapest replica set admitting a valid assignment under `policy`.
pub fn exact(tree: &DistributionTree, policy: Policy, cap: usize) -> Result<OracleOutcome, OracleError> {
    let internal = tree.internal_nodes();
    if internal.len() > cap {
        return Err(OracleError::CapExceeded { what: "internal node", count: internal.len(), cap });
    }
    if policy == Policy::Upwards && tree.clients().len() > cap {
        return Err(OracleError::CapExceeded { what: "client", count: tree.clients().len(), cap });
    }
    let placement_of = |mask: u32| -> Placement {
        internal.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &j)| j).collect()
    };

    // Feasibility under Multiple and Upwards is monotone in the replica set.
    if policy != Policy::Closest && !feasible_multiple(tree, &placement_of(full_mask(internal.len()))) {
        return Ok(OracleOutcome::Infeasible);
    }

    let total = tree.total_requests();
    let demanding: Vec<NodeIdx> = tree.clients().iter().copied().filter(|&c| tree.requests(c) > 0).collect();
    for (cost, mask) in masks_by_cost(tree) {
        let capacity: u64 =
            internal.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &j)| tree.capacity(j)).sum();
        if capacity < total {
            continue;
        }
        let placement = placement_of(mask);
        if !demanding.iter().all(|&c| tree.ancestors_iter(c).any(|a| placement.contains(a))) {
            continue;
        }
        let witness = match policy {
            Policy::Closest => closest_assignment(tree, &placement),
            Policy::Upwards => upwards_assignment(tree, &placement),
            Policy::Multiple => feasible_multiple(tree, &placement).then(|| {
                greedy_absorb(tree, |j| tree.capacity(j), |j| placement.contains(j)).assignment
            }),
        };
        if let Some(assignment) = witness {
            return Ok(OracleOutcome::Optimal { cost, placement, assignment });
        }
    }
    Ok(OracleOutcome::Infeasible)
}

fn full_mask(bits: usize) -> u32 {
    if bits >= 32 {
        u32::MAX
    } else {
        (1u32 << bits) - 1
    }
}

fn masks_by_cost(tree: &DistributionTree) -> Vec<(Rational, u32)> {
    let internal = tree.internal_nodes();
    let costs: Vec<Rational> = internal.iter().map(|&j| tree.storage_cost(j)).collect();
    let mut masks: Vec<(Rational, u32, u32)> = (0..=full_mask(internal.len()))
        .map(|mask| {
            let cost = (0..internal.len())
                .filter(|b| mask >> b & 1 == 1)
                .fold(Rational::zero(), |acc, b| acc + costs[b]);
            (cost, mask.count_ones(), mask)
        })
        .collect();
    masks.sort();
    masks.into_iter().map(|(c, _, m)| (c, m)).collect()
}

/// Multiple feasibility of a fixed replica set: every replica absorbs as
/// much of the pending flow of its subtree as it can, bottom-up.
pub fn feasible_multiple(tree: &DistributionTree, placement: &Placement) -> bool {
    let mut pending = vec![0u64; tree.len()];
    for node in tree.postorder() {
        pending[node.0] = if tree.is_client(node) {
            tree.requests(node)
        } else {
            let inflow: u64 = tree.children(node).iter().map(|c| pending[c.0]).sum();
            if placement.contains(node) {
                inflow.saturating_sub(tree.capacity(node))
            } else {
                inflow
            }
        };
    }
    pending[tree.root().0] == 0
}

/// Forced Closest assignment, if every server stays within capacity.
fn closest_assignment(tree: &DistributionTree, placement: &Placement) -> Option<Assignment> {
    let mut load = vec![0u64; tree.len()];
    let mut assignment = Assignment::new();
    for &c in tree.clients() {
        let r = tree.requests(c);
        if r == 0 {
            continue;
        }
        let server = tree.ancestors_iter(c).find(|&a| placement.contains(a))?;
        load[server.0] += r;
        if load[server.0] > tree.capacity(server) {
            return None;
        }
        assignment.add(c, server, r);
    }
    Some(assignment)
}

/// Single-server assignment by backtracking over clients in non-increasing
/// request order, trying the nearest replica first.
fn upwards_assignment(tree: &DistributionTree, placement: &Placement) -> Option<Assignment> {
    let mut clients: Vec<NodeIdx> = tree.clients().iter().copied().filter(|&c| tree.requests(c) > 0).collect();
    clients.sort_by(|&a, &b| tree.requests(b).cmp(&tree.requests(a)).then_with(|| tree.id(a).cmp(tree.id(b))));
    let servers: Vec<Vec<NodeIdx>> =
        clients.iter().map(|&c| tree.ancestors_iter(c).filter(|&a| placement.contains(a)).collect()).collect();
    let mut search = UpwardsSearch {
        tree,
        placement,
        clients: &clients,
        servers: &servers,
        remaining: (0..tree.len()).map(|k| tree.capacity(NodeIdx(k))).collect(),
        chosen: vec![NodeIdx(0); clients.len()],
        dead: HashSet::new(),
    };
    if !search.go(0) {
        return None;
    }
    let mut assignment = Assignment::new();
    for (k, &c) in clients.iter().enumerate() {
        assignment.add(c, search.chosen[k], tree.requests(c));
    }
    Some(assignment)
}

struct UpwardsSearch<'a> {
    tree: &'a DistributionTree,
    placement: &'a Placement,
    clients: &'a [NodeIdx],
    servers: &'a [Vec<NodeIdx>],
    remaining: Vec<u64>,
    chosen: Vec<NodeIdx>,
    /// Known dead ends: (next client, remaining capacities of the replicas).
    dead: HashSet<(usize, Vec<u64>)>,
}

impl UpwardsSearch<'_> {
    fn go(&mut self, k: usize) -> bool {
        if k == self.clients.len() {
            return true;
        }
        let key = (k, self.placement.iter().map(|j| self.remaining[j.0]).collect::<Vec<_>>());
        if self.dead.contains(&key) || !self.relaxation_feasible(k) {
            self.dead.insert(key);
            return false;
        }
        let r = self.tree.requests(self.clients[k]);
        for s in 0..self.servers[k].len() {
            let a = self.servers[k][s];
            if self.remaining[a.0] < r {
                continue;
            }
            self.remaining[a.0] -= r;
            self.chosen[k] = a;
            if self.go(k + 1) {
                return true;
            }
            self.remaining[a.0] += r;
        }
        self.dead.insert(key);
        false
    }

    /// Multiple feasibility of the unassigned clients with the capacities
    /// left, a necessary condition.
    fn relaxation_feasible(&self, k: usize) -> bool {
        let tree = self.tree;
        let mut demand = vec![0u64; tree.len()];
        for &c in &self.clients[k..] {
            demand[c.0] = tree.requests(c);
        }
        let mut pending = vec![0u64; tree.len()];
        for node in tree.postorder() {
            pending[node.0] = if tree.is_client(node) {
                demand[node.0]
            } else {
                let inflow: u64 = tree.children(node).iter().map(|c| pending[c.0]).sum();
                if self.placement.contains(node) {
                    inflow.saturating_sub(self.remaining[node.0])
                } else {
                    inflow
                }
            };
        }
        pending[tree.root().0] == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::validate::{validate_all, ConstraintProfile};

    fn optimum(tree: &DistributionTree, policy: Policy) -> Option<i64> {
        let out = exact(tree, policy, DEFAULT_CAP).unwrap();
        if let OracleOutcome::Optimal { placement, assignment, .. } = &out {
            let report = validate_all(tree, placement, assignment, policy, ConstraintProfile::NONE);
            assert!(report.is_ok(), "{policy}: {report}");
        }
        out.cost().map(|c| c.to_integer())
    }

    #[test]
    fn fig1_feasibility() {
        let a = fixtures::fig1a();
        let b = fixtures::fig1b();
        let c = fixtures::fig1c();
        assert_eq!([Policy::Closest, Policy::Upwards, Policy::Multiple].map(|p| optimum(&a, p)), [Some(1); 3]);
        assert_eq!(optimum(&b, Policy::Closest), None);
        assert_eq!(optimum(&b, Policy::Upwards), Some(2));
        assert_eq!(optimum(&b, Policy::Multiple), Some(2));
        assert_eq!(optimum(&c, Policy::Closest), None);
        assert_eq!(optimum(&c, Policy::Upwards), None);
        assert_eq!(optimum(&c, Policy::Multiple), Some(2));
    }

    #[test]
    fn fig2_n2() {
        let tree = fixtures::fig2(2);
        assert_eq!(optimum(&tree, Policy::Closest), Some(4));
        assert_eq!(optimum(&tree, Policy::Upwards), Some(3));
    }

    #[test]
    fn fig3_and_fig4() {
        assert_eq!(optimum(&fixtures::fig3(2), Policy::Multiple), Some(3));
        let tree = fixtures::fig4(2, 3);
        assert_eq!(optimum(&tree, Policy::Upwards), Some(8));
        assert_eq!(optimum(&tree, Policy::Multiple), Some(4));
    }

    #[test]
    fn zero_requests_cost_nothing() {
        let tree: DistributionTree = "node r 3 1\nclient c requests 0 qos inf parent r comm 1 bw inf".parse().unwrap();
        for p in Policy::ALL {
            match exact(&tree, p, DEFAULT_CAP).unwrap() {
                OracleOutcome::Optimal { cost, placement, .. } => {
                    assert!(cost.is_zero() && placement.is_empty())
                }
                OracleOutcome::Infeasible => panic!("{p}"),
            }
        }
    }

    #[test]
    fn overloaded_tree_is_infeasible() {
        let tree: DistributionTree = "node r 2 1\nnode a 2 1 parent r comm 1 bw inf\n\
             client c requests 5 qos inf parent a comm 1 bw inf"
            .parse()
            .unwrap();
        for p in Policy::ALL {
            assert_eq!(exact(&tree, p, DEFAULT_CAP).unwrap(), OracleOutcome::Infeasible);
        }
    }

    #[test]
    fn feasible_multiple_cases() {
        let c = fixtures::fig1c();
        let both: Placement = c.internal_nodes().iter().copied().collect();
        assert!(feasible_multiple(&c, &both));
        assert!(!feasible_multiple(&c, &Placement::new()));
        // Capacities telescoping along one root path.
        let chain: DistributionTree = "node a 1 1\nnode b 2 1 parent a comm 1 bw inf\n\
             node c 3 1 parent b comm 1 bw inf\nclient x requests 6 qos inf parent c comm 1 bw inf"
            .parse()
            .unwrap();
        let all: Placement = chain.internal_nodes().iter().copied().collect();
        assert!(feasible_multiple(&chain, &all));
    }

    #[test]
    fn cap_is_enforced() {
        let tree = fixtures::fig2(3);
        assert!(matches!(exact(&tree, Policy::Multiple, 4), Err(OracleError::CapExceeded { .. })));
    }
}
