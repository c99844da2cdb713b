//! Optimal replica counting under the Multiple policy on trees where every
//! node has the same capacity `W`.
//!
//! Three passes:
//! 1. [`pass1`] walks the tree bottom-up and places a replica on every node
//!    whose incoming flow reaches `W`, removing `W` requests from the flow.
//! 2. [`pass2`] repeatedly places a replica on the free node with the largest
//!    useful flow (minimum flow on its path to the root) until no request
//!    reaches the root unserved.
//! 3. [`pass3`] distributes client requests to the chosen replicas bottom-up,
//!    left to right.
//!
//! [`canonical_diagnostics`] computes the canonical flows used to argue the
//! optimality of the construction; they are exposed for testing.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::solution::{Assignment, Placement};
use crate::tree::{DistributionTree, NodeIdx};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OptimalError {
    #[error("all internal nodes must share the same capacity")]
    NotHomogeneous,
    #[error("no solution: residual {residual} requests at root")]
    Infeasible { residual: u64 },
}

/// Flow bookkeeping shared by the three passes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowState {
    pub capacity: u64,
    /// Unserved requests crossing the link from each node to its parent
    /// (for the root: requests reaching the root unserved).
    pub flow: Vec<u64>,
    /// Total requests issued in each subtree.
    pub tflow: Vec<u64>,
    /// Useful flows from the last pass-2 iteration (zero before pass 2).
    pub uflow: Vec<u64>,
    /// Replicas placed by pass 1, in placement order.
    pub saturated: Vec<NodeIdx>,
    /// Replicas placed after pass 1 with the useful flow they absorbed.
    pub extra: Vec<(NodeIdx, u64)>,
    in_repl: Vec<bool>,
}

impl FlowState {
    pub fn is_replica(&self, node: NodeIdx) -> bool {
        self.in_repl[node.0]
    }

    pub fn replicas(&self) -> Placement {
        self.saturated.iter().copied().chain(self.extra.iter().map(|&(n, _)| n)).collect()
    }

    pub fn replica_count(&self) -> usize {
        self.saturated.len() + self.extra.len()
    }

    pub fn root_flow(&self) -> u64 {
        self.flow[0]
    }

    fn add_extra(&mut self, tree: &DistributionTree, node: NodeIdx, amount: u64) {
        self.in_repl[node.0] = true;
        self.extra.push((node, amount));
        self.flow[node.0] -= amount;
        for a in tree.ancestors_iter(node) {
            self.flow[a.0] -= amount;
        }
    }
}

/// Bottom-up saturation: every node whose incoming flow reaches `capacity`
/// gets a replica that absorbs exactly `capacity` requests.
///
/// # Panics
/// If `capacity` is zero.
pub fn pass1(tree: &DistributionTree, capacity: u64) -> FlowState {
    assert!(capacity > 0, "pass1 needs a positive capacity");
    let n = tree.len();
    let mut state = FlowState {
        capacity,
        flow: vec![0; n],
        tflow: vec![0; n],
        uflow: vec![0; n],
        saturated: Vec::new(),
        extra: Vec::new(),
        in_repl: vec![false; n],
    };
    for node in tree.postorder() {
        if tree.is_client(node) {
            state.flow[node.0] = tree.requests(node);
            state.tflow[node.0] = tree.requests(node);
            continue;
        }
        let children = tree.children(node);
        let flow: u64 = children.iter().map(|c| state.flow[c.0]).sum();
        state.tflow[node.0] = children.iter().map(|c| state.tflow[c.0]).sum();
        if flow >= capacity {
            state.flow[node.0] = flow - capacity;
            state.in_repl[node.0] = true;
            state.saturated.push(node);
        } else {
            state.flow[node.0] = flow;
        }
    }
    state
}

/// Useful flow of every node: the minimum flow on its path to the root.
pub fn useful_flows(tree: &DistributionTree, state: &FlowState) -> Vec<u64> {
    let mut uflow = vec![0u64; tree.len()];
    for &node in tree.preorder() {
        uflow[node.0] = match tree.parent(node) {
            None => state.flow[node.0],
            Some(p) => state.flow[node.0].min(uflow[p.0]),
        };
    }
    uflow
}

/// Adds replicas on the free node of maximum useful flow until the root
/// flow is zero. Ties go to the first node in depth-first order.
pub fn pass2(tree: &DistributionTree, state: &mut FlowState) -> Result<(), OptimalError> {
    while state.root_flow() > 0 {
        state.uflow = useful_flows(tree, state);
        let mut best: Option<(NodeIdx, u64)> = None;
        for &node in tree.preorder() {
            if tree.is_client(node) || state.is_replica(node) {
                continue;
            }
            let u = state.uflow[node.0];
            if u > best.map_or(0, |(_, b)| b) {
                best = Some((node, u));
            }
        }
        let Some((node, amount)) = best else {
            return Err(OptimalError::Infeasible { residual: state.root_flow() });
        };
        state.add_extra(tree, node, amount);
    }
    Ok(())
}

/// Result of a bottom-up greedy distribution of requests to servers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Absorption {
    pub assignment: Assignment,
    /// Requests left unserved at the root.
    pub residual: u64,
    /// Elementary steps performed (client entries moved or inspected).
    pub ops: u64,
}

/// Bottom-up, left-to-right distribution of pending client requests.
///
/// Each server takes whole pending clients of its subtree while they fit,
/// then a partial share of the first remaining client to fill its capacity.
pub fn greedy_absorb(
    tree: &DistributionTree,
    capacity: impl Fn(NodeIdx) -> u64,
    is_server: impl Fn(NodeIdx) -> bool,
) -> Absorption {
    let mut pending: Vec<Vec<(NodeIdx, u64)>> = vec![Vec::new(); tree.len()];
    let mut assignment = Assignment::new();
    let mut ops = 0u64;
    for node in tree.postorder() {
        ops += 1;
        if tree.is_client(node) {
            if tree.requests(node) > 0 {
                pending[node.0].push((node, tree.requests(node)));
            }
            continue;
        }
        let mut list = Vec::new();
        for &c in tree.children(node) {
            let moved = std::mem::take(&mut pending[c.0]);
            ops += moved.len() as u64;
            list.extend(moved);
        }
        if is_server(node) {
            let cap = capacity(node);
            let mut load = 0u64;
            list.retain(|&(client, left)| {
                ops += 1;
                if left <= cap - load {
                    load += left;
                    assignment.add(client, node, left);
                    false
                } else {
                    true
                }
            });
            if let Some(first) = list.first_mut() {
                let share = cap - load;
                if share > 0 {
                    first.1 -= share;
                    assignment.add(first.0, node, share);
                }
            }
        }
        pending[node.0] = list;
    }
    let residual = pending[tree.root().0].iter().map(|&(_, left)| left).sum();
    Absorption { assignment, residual, ops }
}

/// Assigns requests to the replicas of `state`, every replica processing at
/// most `state.capacity` requests.
pub fn pass3(tree: &DistributionTree, state: &FlowState) -> Assignment {
    let absorption = greedy_absorb(tree, |_| state.capacity, |n| state.is_replica(n));
    debug_assert_eq!(absorption.residual, 0, "pass3 called on an unfinished flow state");
    absorption.assignment
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultipleSolution {
    pub placement: Placement,
    pub assignment: Assignment,
    pub state: FlowState,
}

/// Minimum number of replicas under the Multiple policy, all capacities equal.
pub fn solve_multiple_homogeneous(tree: &DistributionTree) -> Result<MultipleSolution, OptimalError> {
    let capacity = tree.uniform_capacity().ok_or(OptimalError::NotHomogeneous)?;
    if capacity == 0 {
        let total = tree.total_requests();
        if total > 0 {
            return Err(OptimalError::Infeasible { residual: total });
        }
    }
    let mut state = pass1(tree, capacity.max(1));
    let root = tree.root();
    let flow_root = state.root_flow();
    if flow_root > 0 {
        if flow_root <= capacity && !state.is_replica(root) {
            state.add_extra(tree, root, flow_root);
        } else {
            pass2(tree, &mut state)?;
        }
    }
    let assignment = pass3(tree, &state);
    Ok(MultipleSolution { placement: state.replicas(), assignment, state })
}

/// Canonical flows, independent of any placement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalDiagnostics {
    pub tflow: Vec<u64>,
    pub cflow: Vec<u64>,
    /// Number of saturated nodes in each subtree.
    pub nsn: Vec<u64>,
    pub saturated: BTreeSet<NodeIdx>,
}

pub fn canonical_diagnostics(tree: &DistributionTree, capacity: u64) -> CanonicalDiagnostics {
    let n = tree.len();
    let mut diag = CanonicalDiagnostics {
        tflow: vec![0; n],
        cflow: vec![0; n],
        nsn: vec![0; n],
        saturated: BTreeSet::new(),
    };
    fn visit(tree: &DistributionTree, capacity: u64, s: NodeIdx, d: &mut CanonicalDiagnostics) {
        if tree.is_client(s) {
            d.tflow[s.0] = tree.requests(s);
            d.cflow[s.0] = tree.requests(s);
            return;
        }
        let (mut f, mut x, mut t) = (0, 0, 0);
        for &c in tree.children(s) {
            visit(tree, capacity, c, d);
            f += d.cflow[c.0];
            x += d.nsn[c.0];
            t += d.tflow[c.0];
        }
        d.tflow[s.0] = t;
        if f >= capacity {
            d.saturated.insert(s);
            d.cflow[s.0] = f - capacity;
            d.nsn[s.0] = x + 1;
        } else {
            d.cflow[s.0] = f;
            d.nsn[s.0] = x;
        }
    }
    visit(tree, capacity, tree.root(), &mut diag);
    diag
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::tree::Link;
    use crate::tree::TreeBuilder;
    use crate::validate::{validate_all, ConstraintProfile, Policy};
    use crate::num::Rational;

    fn ids(tree: &DistributionTree, nodes: impl IntoIterator<Item = NodeIdx>) -> Vec<String> {
        let mut v: Vec<String> = nodes.into_iter().map(|n| tree.id(n).to_string()).collect();
        v.sort();
        v
    }

    fn chain(w: u64, r: u64) -> DistributionTree {
        let one = Rational::from_integer(1);
        let mut b = TreeBuilder::new();
        b.root("t", w, one).unwrap();
        b.node("m", w, one, "t", Link::default()).unwrap();
        b.node("b", w, one, "m", Link::default()).unwrap();
        b.client("c", r, None, "b", Link::default()).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn pass1_exact_saturation() {
        let tree: DistributionTree =
            "node r 4 1\nclient c requests 4 qos inf parent r comm 1 bw inf".parse().unwrap();
        let state = pass1(&tree, 4);
        assert_eq!(state.saturated, vec![tree.root()]);
        assert_eq!(state.root_flow(), 0);
    }

    #[test]
    fn pass1_on_chain() {
        let w = 3;
        let tree = chain(w, 2 * w + 1);
        let state = pass1(&tree, w);
        assert_eq!(ids(&tree, state.saturated.iter().copied()), ["b", "m"]);
        assert_eq!(state.root_flow(), 1);
        let sol = solve_multiple_homogeneous(&tree).unwrap();
        assert_eq!(sol.placement.len(), 3);
        let loads = sol.assignment.loads(tree.len());
        assert_eq!(loads[tree.resolve("b").unwrap().0], w);
        assert_eq!(loads[tree.resolve("m").unwrap().0], w);
        assert_eq!(loads[tree.root().0], 1);
        assert!(validate_all(&tree, &sol.placement, &sol.assignment, Policy::Multiple, ConstraintProfile::NONE).is_ok());
    }

    #[test]
    fn fig6_walkthrough() {
        let tree = fixtures::fig6();
        let state = pass1(&tree, 10);
        assert_eq!(ids(&tree, state.saturated.iter().copied()), ["n1", "n10", "n3"]);
        let flow = |id: &str| state.flow[tree.resolve(id).unwrap().0];
        assert_eq!((flow("n10"), flow("n2"), flow("n4"), flow("n3"), flow("n1")), (2, 6, 7, 7, 8));

        let sol = solve_multiple_homogeneous(&tree).unwrap();
        let picks: Vec<(String, u64)> =
            sol.state.extra.iter().map(|&(n, u)| (tree.id(n).to_string(), u)).collect();
        assert_eq!(picks, [("n4".to_string(), 7), ("n2".to_string(), 1)]);
        assert_eq!(sol.state.root_flow(), 0);
        assert_eq!(sol.placement.len(), 5);

        let a = tree.resolve("a").unwrap();
        let n10 = tree.resolve("n10").unwrap();
        let n2 = tree.resolve("n2").unwrap();
        assert_eq!(sol.assignment.get(a, n10), 10);
        assert_eq!(sol.assignment.get(a, n2), 2);
        assert_eq!(sol.assignment.loads(tree.len())[tree.root().0], 5);
        assert!(validate_all(&tree, &sol.placement, &sol.assignment, Policy::Multiple, ConstraintProfile::NONE).is_ok());
    }

    #[test]
    fn pass2_not_needed_when_pass1_finishes() {
        let tree: DistributionTree =
            "node r 4 1\nclient c requests 8 qos inf parent r comm 1 bw inf".parse().unwrap();
        let mut state = pass1(&tree, 8);
        let before = state.clone();
        pass2(&tree, &mut state).unwrap();
        assert_eq!(state, before);
    }

    #[test]
    fn single_node_overload_is_infeasible() {
        let tree: DistributionTree =
            "node r 1 1\nclient c requests 2 qos inf parent r comm 1 bw inf".parse().unwrap();
        let mut state = pass1(&tree, 1);
        assert_eq!(state.root_flow(), 1);
        assert_eq!(pass2(&tree, &mut state), Err(OptimalError::Infeasible { residual: 1 }));
        assert_eq!(solve_multiple_homogeneous(&tree).unwrap_err(), OptimalError::Infeasible { residual: 1 });
    }

    #[test]
    fn root_covers_everything() {
        let tree: DistributionTree = "node r 10 1\nnode a 10 1 parent r comm 1 bw inf\n\
             client c1 requests 3 qos inf parent a comm 1 bw inf\nclient c2 requests 4 qos inf parent r comm 1 bw inf"
            .parse()
            .unwrap();
        let sol = solve_multiple_homogeneous(&tree).unwrap();
        assert_eq!(ids(&tree, sol.placement.iter()), ["r"]);
        for &c in tree.clients() {
            assert_eq!(sol.assignment.get(c, tree.root()), tree.requests(c));
        }
    }

    #[test]
    fn fixture_optima() {
        for n in 1..=3 {
            let sol = solve_multiple_homogeneous(&fixtures::fig3(n)).unwrap();
            assert_eq!(sol.placement.len() as u64, n + 1);
        }
        let tree = fixtures::fig1c();
        let sol = solve_multiple_homogeneous(&tree).unwrap();
        assert_eq!(ids(&tree, sol.placement.iter()), ["s1", "s2"]);
    }

    #[test]
    fn rejects_heterogeneous_capacities() {
        assert_eq!(solve_multiple_homogeneous(&fixtures::fig4(2, 3)).unwrap_err(), OptimalError::NotHomogeneous);
    }

    #[test]
    fn canonical_flows() {
        let tree: DistributionTree = "node r 5 1\nclient a requests 7 qos inf parent r comm 1 bw inf\n\
             client b requests 5 qos inf parent r comm 1 bw inf"
            .parse()
            .unwrap();
        let d = canonical_diagnostics(&tree, 5);
        let a = tree.resolve("a").unwrap();
        assert_eq!((d.cflow[a.0], d.nsn[a.0]), (7, 0));
        assert!(d.saturated.contains(&tree.root()));
        assert_eq!((d.cflow[0], d.nsn[0]), (7, 1));
    }
}
