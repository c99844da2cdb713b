//! Upwards heuristics: every client is served by a single replica.

use super::{Heuristic, HeuristicResult, State};
use crate::tree::{DistributionTree, NodeIdx};

/// Upwards Top Down.
///
/// First pass, depth-first: every node exhausted by its pending requests
/// becomes a replica and takes whole clients, largest first, while they fit.
/// Second pass: every non-replica node with pending requests becomes a
/// replica and takes them all.
pub fn utd(tree: &DistributionTree) -> HeuristicResult {
    let mut st = State::new(tree);
    let mut order = st.client_order(true);
    for &s in tree.preorder() {
        st.ops += 1;
        if tree.is_client(s) {
            continue;
        }
        let inreq = st.inreq[s.0];
        if inreq >= st.capacity(s) && inreq > 0 {
            st.add_replica(s);
            st.treated[s.0] = true;
            st.delete_whole(&mut order, s, st.capacity(s));
        }
    }
    second_pass(&mut st, tree.root(), &mut |st, s| {
        let pending = st.inreq[s.0];
        st.delete_whole(&mut order, s, pending)
    });
    st.finish(Heuristic::Utd)
}

/// Top-down completion shared by UTD, MTD and MBU.
pub(super) fn second_pass(st: &mut State, s: NodeIdx, delete: &mut dyn FnMut(&mut State, NodeIdx)) {
    st.ops += 1;
    if !st.replica[s.0] && st.inreq[s.0] > 0 {
        debug_assert!(st.inreq[s.0] < st.capacity(s));
        st.add_replica(s);
        delete(st, s);
    } else {
        let tree = st.tree;
        for &c in tree.children(s) {
            if tree.is_internal(c) && st.inreq[c.0] > 0 {
                second_pass(st, c, delete);
            }
        }
    }
}

/// Upwards Big Client First: clients by non-increasing requests, each sent
/// to the ancestor with the smallest remaining capacity that still fits it
/// (closest one on ties). Fails at the first client with no such ancestor.
pub fn ubcf(tree: &DistributionTree) -> HeuristicResult {
    let mut st = State::new(tree);
    let mut remaining: Vec<u64> = (0..tree.len()).map(|k| tree.capacity(NodeIdx(k))).collect();
    let mut clients: Vec<NodeIdx> = tree.clients().iter().copied().filter(|&c| tree.requests(c) > 0).collect();
    clients.sort_by(|&a, &b| tree.requests(b).cmp(&tree.requests(a)).then_with(|| tree.id(a).cmp(tree.id(b))));
    st.ops += clients.len() as u64;
    for c in clients {
        let r = tree.requests(c);
        let mut best: Option<NodeIdx> = None;
        for a in tree.ancestors_iter(c) {
            st.ops += 1;
            if remaining[a.0] >= r && best.is_none_or(|b| remaining[a.0] < remaining[b.0]) {
                best = Some(a);
            }
        }
        let Some(a) = best else { break };
        if !st.replica[a.0] {
            st.add_replica(a);
        }
        remaining[a.0] -= r;
        st.serve(c, a, r);
    }
    st.finish(Heuristic::Ubcf)
}
