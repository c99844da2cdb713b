//! Polynomial heuristics for the Replica Cost problem without QoS or
//! bandwidth constraints.
//!
//! Each heuristic tracks `inreq_j`, the requests of `subtree(j)` not yet
//! processed by a replica, and succeeds iff `inreq_root` reaches zero.
//! Every run records a full assignment so results can be checked with
//! [`crate::validate::validate_all`].

mod closest;
mod multiple;
mod upwards;

use std::fmt;
use std::str::FromStr;

use crate::num::Rational;
use crate::solution::{Assignment, Placement};
use crate::tree::{DistributionTree, NodeIdx};
use crate::validate::{placement_cost, Policy};

pub use closest::{cbu, ctda, ctdlf};
pub use multiple::{mbu, mg, mtd};
pub use upwards::{ubcf, utd};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Heuristic {
    Ctda,
    Ctdlf,
    Cbu,
    Utd,
    Ubcf,
    Mtd,
    Mbu,
    Mg,
    MixedBest,
}

impl Heuristic {
    /// The eight base heuristics, in the order [`mixed_best`] tries them.
    pub const BASE: [Heuristic; 8] = [
        Heuristic::Ctda,
        Heuristic::Ctdlf,
        Heuristic::Cbu,
        Heuristic::Utd,
        Heuristic::Ubcf,
        Heuristic::Mtd,
        Heuristic::Mbu,
        Heuristic::Mg,
    ];

    pub const ALL: [Heuristic; 9] = [
        Heuristic::Ctda,
        Heuristic::Ctdlf,
        Heuristic::Cbu,
        Heuristic::Utd,
        Heuristic::Ubcf,
        Heuristic::Mtd,
        Heuristic::Mbu,
        Heuristic::Mg,
        Heuristic::MixedBest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Heuristic::Ctda => "CTDA",
            Heuristic::Ctdlf => "CTDLF",
            Heuristic::Cbu => "CBU",
            Heuristic::Utd => "UTD",
            Heuristic::Ubcf => "UBCF",
            Heuristic::Mtd => "MTD",
            Heuristic::Mbu => "MBU",
            Heuristic::Mg => "MG",
            Heuristic::MixedBest => "MB",
        }
    }

    pub fn policy(self) -> Policy {
        match self {
            Heuristic::Ctda | Heuristic::Ctdlf | Heuristic::Cbu => Policy::Closest,
            Heuristic::Utd | Heuristic::Ubcf => Policy::Upwards,
            Heuristic::Mtd | Heuristic::Mbu | Heuristic::Mg | Heuristic::MixedBest => Policy::Multiple,
        }
    }

    pub fn run(self, tree: &DistributionTree) -> HeuristicResult {
        match self {
            Heuristic::Ctda => ctda(tree),
            Heuristic::Ctdlf => ctdlf(tree),
            Heuristic::Cbu => cbu(tree),
            Heuristic::Utd => utd(tree),
            Heuristic::Ubcf => ubcf(tree),
            Heuristic::Mtd => mtd(tree),
            Heuristic::Mbu => mbu(tree),
            Heuristic::Mg => mg(tree),
            Heuristic::MixedBest => mixed_best(tree),
        }
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Heuristic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_uppercase().replace(['-', '_'], "");
        Heuristic::ALL
            .into_iter()
            .find(|h| h.name() == key)
            .or((key == "MIXEDBEST").then_some(Heuristic::MixedBest))
            .ok_or_else(|| format!("unknown heuristic `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeuristicResult {
    pub heuristic: Heuristic,
    /// Base heuristic that produced the solution (differs from `heuristic`
    /// only for MixedBest).
    pub origin: Heuristic,
    pub policy: Policy,
    pub placement: Placement,
    pub assignment: Assignment,
    pub success: bool,
    pub cost: Rational,
    /// `inreq_root` at termination.
    pub residual: u64,
    /// Basic operations performed, for complexity checks.
    pub ops: u64,
}

/// Runs the eight base heuristics and keeps the cheapest success (first one
/// on ties). All solutions are valid under Multiple.
pub fn mixed_best(tree: &DistributionTree) -> HeuristicResult {
    let runs: Vec<HeuristicResult> = Heuristic::BASE.iter().map(|h| h.run(tree)).collect();
    best_of(&runs)
}

/// MixedBest over results already computed, in the order given.
pub fn best_of(runs: &[HeuristicResult]) -> HeuristicResult {
    let ops = runs.iter().map(|r| r.ops).sum();
    let best = runs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.success)
        .min_by_key(|&(k, r)| (r.cost, k))
        .map(|(k, _)| k);
    let mut chosen = match best {
        Some(k) => runs[k].clone(),
        // Report the last run, MG when all eight are present.
        None => runs.last().expect("at least one run").clone(),
    };
    chosen.heuristic = Heuristic::MixedBest;
    chosen.policy = Policy::Multiple;
    chosen.ops = ops;
    chosen
}

/// Mutable bookkeeping shared by the traversal heuristics.
pub(crate) struct State<'t> {
    pub tree: &'t DistributionTree,
    pub inreq: Vec<u64>,
    /// Remaining requests `r'_i` of each client (zero for internal nodes).
    pub left: Vec<u64>,
    pub replica: Vec<bool>,
    pub treated: Vec<bool>,
    pub placement: Placement,
    pub assignment: Assignment,
    pub ops: u64,
    tin: Vec<usize>,
    tout: Vec<usize>,
    /// Clients in depth-first order; `subtree(j)` is a contiguous range.
    clients_pre: Vec<NodeIdx>,
    crange: Vec<(usize, usize)>,
}

impl<'t> State<'t> {
    pub fn new(tree: &'t DistributionTree) -> Self {
        let n = tree.len();
        let mut left = vec![0u64; n];
        let mut inreq = vec![0u64; n];
        for node in tree.postorder() {
            if tree.is_client(node) {
                left[node.0] = tree.requests(node);
                inreq[node.0] = left[node.0];
            } else {
                inreq[node.0] = tree.children(node).iter().map(|c| inreq[c.0]).sum();
            }
        }
        let mut tin = vec![0usize; n];
        let mut prefix = Vec::with_capacity(n + 1);
        let mut clients_pre = Vec::new();
        for (pos, &node) in tree.preorder().iter().enumerate() {
            tin[node.0] = pos;
            prefix.push(clients_pre.len());
            if tree.is_client(node) {
                clients_pre.push(node);
            }
        }
        prefix.push(clients_pre.len());
        let mut size = vec![1usize; n];
        for node in tree.postorder() {
            if let Some(p) = tree.parent(node) {
                size[p.0] += size[node.0];
            }
        }
        let tout: Vec<usize> = (0..n).map(|k| tin[k] + size[k]).collect();
        let crange = (0..n).map(|k| (prefix[tin[k]], prefix[tout[k]])).collect();
        State {
            tree,
            inreq,
            left,
            replica: vec![false; n],
            treated: vec![false; n],
            placement: Placement::new(),
            assignment: Assignment::new(),
            ops: 0,
            tin,
            tout,
            clients_pre,
            crange,
        }
    }

    pub fn capacity(&self, node: NodeIdx) -> u64 {
        self.tree.capacity(node)
    }

    pub fn in_subtree(&self, root: NodeIdx, node: NodeIdx) -> bool {
        self.tin[root.0] <= self.tin[node.0] && self.tin[node.0] < self.tout[root.0]
    }

    pub fn add_replica(&mut self, node: NodeIdx) {
        self.replica[node.0] = true;
        self.placement.insert(node);
    }

    /// Moves `amount` requests of `client` to `server`, updating `inreq` on
    /// the whole path to the root.
    pub fn serve(&mut self, client: NodeIdx, server: NodeIdx, amount: u64) {
        if amount == 0 {
            return;
        }
        self.left[client.0] -= amount;
        self.inreq[client.0] -= amount;
        for a in self.tree.ancestors_iter(client) {
            self.inreq[a.0] -= amount;
            self.ops += 1;
        }
        self.assignment.add(client, server, amount);
    }

    /// `server` takes every pending request of its subtree.
    pub fn absorb_all(&mut self, server: NodeIdx) {
        let (lo, hi) = self.crange[server.0];
        for k in lo..hi {
            self.ops += 1;
            let c = self.clients_pre[k];
            let amount = self.left[c.0];
            self.serve(c, server, amount);
        }
    }

    /// Clients with pending requests sorted by `left` (descending when
    /// `largest_first`), ties by id.
    pub fn client_order(&mut self, largest_first: bool) -> ClientOrder {
        let mut list: Vec<NodeIdx> = self.tree.clients().iter().copied().filter(|c| self.left[c.0] > 0).collect();
        let tree = self.tree;
        let left = &self.left;
        list.sort_by(|&a, &b| key(left, largest_first, a).cmp(&key(left, largest_first, b)).then_with(|| tree.id(a).cmp(tree.id(b))));
        self.ops += list.len() as u64;
        ClientOrder { list, largest_first }
    }

    /// Whole-client deletion: scans pending clients of `server`'s subtree in
    /// list order, serving each one that fits entirely in `budget`.
    pub fn delete_whole(&mut self, order: &mut ClientOrder, server: NodeIdx, mut budget: u64) {
        for k in 0..order.list.len() {
            let c = order.list[k];
            self.ops += 1;
            let amount = self.left[c.0];
            if amount == 0 || !self.in_subtree(server, c) {
                continue;
            }
            if amount <= budget {
                budget -= amount;
                self.serve(c, server, amount);
                if budget == 0 {
                    break;
                }
            }
        }
        self.compact(order);
    }

    /// Deletion allowing one split client: whole clients are served while
    /// they fit, then the first client that does not fit gives up what is
    /// left of `budget`.
    pub fn delete_split(&mut self, order: &mut ClientOrder, server: NodeIdx, mut budget: u64) {
        let mut split = None;
        for k in 0..order.list.len() {
            let c = order.list[k];
            self.ops += 1;
            let amount = self.left[c.0];
            if amount == 0 || !self.in_subtree(server, c) {
                continue;
            }
            if amount <= budget {
                budget -= amount;
                self.serve(c, server, amount);
            } else {
                if budget > 0 {
                    self.serve(c, server, budget);
                    split = Some(c);
                }
                break;
            }
        }
        self.compact(order);
        if let Some(c) = split {
            let list = &mut order.list;
            let pos = list.iter().position(|&x| x == c).expect("split client is pending");
            list.remove(pos);
            let tree = self.tree;
            let left = &self.left;
            let largest_first = order.largest_first;
            let at = list.partition_point(|&x| {
                key(left, largest_first, x)
                    .cmp(&key(left, largest_first, c))
                    .then_with(|| tree.id(x).cmp(tree.id(c)))
                    .is_lt()
            });
            list.insert(at, c);
            self.ops += list.len() as u64;
        }
    }

    fn compact(&mut self, order: &mut ClientOrder) {
        self.ops += order.list.len() as u64;
        let left = &self.left;
        order.list.retain(|c| left[c.0] > 0);
    }

    pub fn finish(self, heuristic: Heuristic) -> HeuristicResult {
        let residual = self.inreq[self.tree.root().0];
        HeuristicResult {
            heuristic,
            origin: heuristic,
            policy: heuristic.policy(),
            cost: placement_cost(self.tree, &self.placement),
            placement: self.placement,
            assignment: self.assignment,
            success: residual == 0,
            residual,
            ops: self.ops,
        }
    }
}

fn key(left: &[u64], largest_first: bool, c: NodeIdx) -> u64 {
    if largest_first {
        u64::MAX - left[c.0]
    } else {
        left[c.0]
    }
}

/// Pending clients in deletion order.
pub(crate) struct ClientOrder {
    list: Vec<NodeIdx>,
    largest_first: bool,
}
