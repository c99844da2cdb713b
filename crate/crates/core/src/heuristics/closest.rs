//! Closest heuristics: a replica always takes every pending request of its
//! subtree.

use std::collections::VecDeque;

use super::{Heuristic, HeuristicResult, State};
use crate::tree::{DistributionTree, NodeIdx};

fn fits(st: &State, s: NodeIdx) -> bool {
    let inreq = st.inreq[s.0];
    inreq > 0 && inreq <= st.capacity(s)
}

/// Closest Top Down All: breadth-first sweeps, each node able to absorb its
/// whole pending subtree becomes a server and its subtree is not explored.
/// Sweeps repeat until one adds no server.
pub fn ctda(tree: &DistributionTree) -> HeuristicResult {
    let mut st = State::new(tree);
    loop {
        let mut added = false;
        let mut fifo = VecDeque::from([tree.root()]);
        while let Some(s) = fifo.pop_front() {
            st.ops += 1;
            if st.replica[s.0] {
                continue;
            }
            if fits(&st, s) {
                st.add_replica(s);
                st.absorb_all(s);
                added = true;
            } else {
                fifo.extend(tree.children(s).iter().filter(|&&c| tree.is_internal(c)));
            }
        }
        if !added {
            break;
        }
    }
    st.finish(Heuristic::Ctda)
}

/// Closest Top Down Largest First: like [`ctda`], but children are queued
/// heaviest pending subtree first and the traversal restarts from the root
/// after every placement.
pub fn ctdlf(tree: &DistributionTree) -> HeuristicResult {
    let mut st = State::new(tree);
    // Internal children of every node, by decreasing inreq then declaration.
    let mut sorted: Vec<Vec<NodeIdx>> = (0..tree.len())
        .map(|k| {
            let mut v: Vec<NodeIdx> =
                tree.children(NodeIdx(k)).iter().copied().filter(|&c| tree.is_internal(c)).collect();
            v.sort_by_key(|&c| (std::cmp::Reverse(st.inreq[c.0]), c.0));
            v
        })
        .collect();
    while let Some(s) = ctdlf_step(&mut st, &sorted) {
        let mut k = s;
        while let Some(p) = tree.parent(k) {
            let list = &mut sorted[p.0];
            let pos = list.iter().position(|&x| x == k).expect("child listed under parent");
            list.remove(pos);
            let key = (std::cmp::Reverse(st.inreq[k.0]), k.0);
            let at = list.partition_point(|&x| (std::cmp::Reverse(st.inreq[x.0]), x.0) < key);
            list.insert(at, k);
            st.ops += list.len() as u64 + 1;
            k = p;
        }
    }
    st.finish(Heuristic::Ctdlf)
}

fn ctdlf_step(st: &mut State, sorted: &[Vec<NodeIdx>]) -> Option<NodeIdx> {
    let mut fifo = VecDeque::from([st.tree.root()]);
    while let Some(s) = fifo.pop_front() {
        st.ops += 1;
        if st.replica[s.0] {
            continue;
        }
        if fits(st, s) {
            st.add_replica(s);
            st.absorb_all(s);
            return Some(s);
        }
        fifo.extend(sorted[s.0].iter().copied());
    }
    None
}

/// Closest Bottom Up: nodes are treated once all their internal children
/// are, and become servers when they can absorb their pending subtree.
pub fn cbu(tree: &DistributionTree) -> HeuristicResult {
    let mut st = State::new(tree);
    for s in tree.postorder() {
        st.ops += 1;
        if tree.is_client(s) {
            continue;
        }
        st.treated[s.0] = true;
        if fits(&st, s) {
            st.add_replica(s);
            st.absorb_all(s);
        }
    }
    st.finish(Heuristic::Cbu)
}
