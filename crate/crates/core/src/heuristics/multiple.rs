//! Multiple heuristics: a client's requests may be split among replicas.

use super::upwards::second_pass;
use super::{Heuristic, HeuristicResult, State};
use crate::optimal::greedy_absorb;
use crate::solution::Placement;
use crate::tree::DistributionTree;
use crate::validate::placement_cost;

/// Multiple Top Down: the two passes of UTD, where a replica left with
/// spare capacity after whole-client deletions takes part of the next
/// client in non-increasing order.
pub fn mtd(tree: &DistributionTree) -> HeuristicResult {
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
            st.delete_split(&mut order, s, st.capacity(s));
        }
    }
    second_pass(&mut st, tree.root(), &mut |st, s| {
        let pending = st.inreq[s.0];
        st.delete_split(&mut order, s, pending)
    });
    st.finish(Heuristic::Mtd)
}

/// Multiple Bottom Up: a bottom-up first pass places replicas on exhausted
/// nodes, deleting clients in non-decreasing order with a final split; a
/// top-down second pass serves what is left.
pub fn mbu(tree: &DistributionTree) -> HeuristicResult {
    let mut st = State::new(tree);
    let mut order = st.client_order(false);
    for s in tree.postorder() {
        st.ops += 1;
        if tree.is_client(s) {
            continue;
        }
        st.treated[s.0] = true;
        let inreq = st.inreq[s.0];
        if st.capacity(s) <= inreq && inreq > 0 {
            st.add_replica(s);
            st.delete_split(&mut order, s, st.capacity(s));
        }
    }
    second_pass(&mut st, tree.root(), &mut |st, s| {
        let pending = st.inreq[s.0];
        st.delete_split(&mut order, s, pending)
    });
    st.finish(Heuristic::Mbu)
}

/// Multiple Greedy: bottom-up greedy absorption on every internal node; a
/// node holds a replica iff it processes at least one request. Finds a
/// solution whenever one exists.
pub fn mg(tree: &DistributionTree) -> HeuristicResult {
    let absorption = greedy_absorb(tree, |j| tree.capacity(j), |j| tree.is_internal(j));
    let placement: Placement = absorption.assignment.used_servers();
    HeuristicResult {
        heuristic: Heuristic::Mg,
        origin: Heuristic::Mg,
        policy: Heuristic::Mg.policy(),
        cost: placement_cost(tree, &placement),
        placement,
        assignment: absorption.assignment,
        success: absorption.residual == 0,
        residual: absorption.residual,
        ops: absorption.ops,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::heuristics::tests::assert_clean;
    use crate::num::Rational;

    #[test]
    fn fig1c_mtd_splits() {
        let tree = fixtures::fig1c();
        let r = mtd(&tree);
        assert_clean(&tree, &r);
        assert_eq!(r.placement.len(), 2);
        let c1 = tree.resolve("c1").unwrap();
        assert_eq!(r.assignment.servers_of(c1).iter().map(|&(_, k)| k).collect::<Vec<_>>(), [1, 1]);
        for r in [mbu(&tree), mg(&tree)] {
            assert_clean(&tree, &r);
            assert_eq!(r.placement.len(), 2);
        }
    }

    #[test]
    fn fig1b_mbu_two_replicas() {
        let tree = fixtures::fig1b();
        let r = mbu(&tree);
        assert_clean(&tree, &r);
        assert_eq!(r.placement.len(), 2);
    }

    #[test]
    fn fig3_mtd_mbu_traces() {
        for n in 1..=3u64 {
            let tree = fixtures::fig3(n);
            for r in [mtd(&tree), mbu(&tree), mg(&tree)] {
                if r.success {
                    assert_clean(&tree, &r);
                    let k = r.placement.len() as u64;
                    assert!(n < k && k <= 2 * n + 1, "{} placed {k}", r.heuristic);
                }
            }
        }
        // The root takes the largest clients first and never reaches its own.
        let r = mtd(&fixtures::fig3(2));
        assert!(!r.success);
    }

    #[test]
    fn fig4_mg_bounds() {
        for n in 2..=4u64 {
            let tree = fixtures::fig4(n, 3);
            let r = mg(&tree);
            assert_clean(&tree, &r);
            assert!(r.cost >= Rational::from_integer(2 * n as i64));
            assert!(r.cost <= Rational::from_integer(4 * n as i64));
        }
    }

    #[test]
    fn fig5_mbu() {
        let tree = fixtures::fig5(1, 2);
        let r = mbu(&tree);
        assert_clean(&tree, &r);
        assert_eq!(r.placement.len(), 2);
        // With several small clients the root fills up with them and its own
        // client is left over.
        assert!(!mbu(&fixtures::fig5(2, 4)).success);
    }

    #[test]
    fn exactly_saturated_root() {
        let tree: DistributionTree = "node r 4 1\nclient c requests 4 qos inf parent r comm 1 bw inf".parse().unwrap();
        for r in [mtd(&tree), mbu(&tree), mg(&tree)] {
            assert_clean(&tree, &r);
            assert_eq!(r.placement.len(), 1);
        }
    }

    #[test]
    fn over_capacity_fails() {
        let tree: DistributionTree = "node r 4 1\nnode a 3 1 parent r comm 1 bw inf\n\
             client c requests 8 qos inf parent a comm 1 bw inf"
            .parse()
            .unwrap();
        let r = mg(&tree);
        assert!(!r.success);
        assert_eq!(r.residual, 1);
    }
}
