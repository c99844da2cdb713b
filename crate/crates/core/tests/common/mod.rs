#![allow(dead_code)]

use std::collections::VecDeque;

use proptest::prelude::*;
use proptest::sample::Index;
use replica_placement::tree::{Link, TreeBuilder};
use replica_placement::validate::validate_all;
use replica_placement::{Assignment, ConstraintProfile, DistributionTree, Placement, Policy, Rational};

#[derive(Debug, Clone)]
pub struct Shape {
    pub parents: Vec<Index>,
    pub capacities: Vec<u64>,
    pub comms: Vec<u64>,
    pub clients: Vec<(Index, u64, u64)>,
}

pub fn build(shape: &Shape, homogeneous: bool) -> DistributionTree {
    let n = shape.capacities.len();
    let w = shape.capacities[0];
    let cap = |k: usize| if homogeneous { w } else { shape.capacities[k] };
    let cost = |k: usize| Rational::from_integer(if homogeneous { 1 } else { cap(k) as i64 });
    let link = |c: u64| Link { comm: Rational::from_integer(c as i64), bandwidth: None };
    let mut b = TreeBuilder::new();
    b.root("n0", cap(0), cost(0)).unwrap();
    for k in 1..n {
        let p = shape.parents[k].index(k);
        b.node(&format!("n{k}"), cap(k), cost(k), &format!("n{p}"), link(shape.comms[k])).unwrap();
    }
    for (i, (p, r, comm)) in shape.clients.iter().enumerate() {
        b.client(&format!("c{i}"), *r, None, &format!("n{}", p.index(n)), link(*comm)).unwrap();
    }
    b.build().unwrap()
}

/// Random tree shapes: attachment to a uniformly chosen earlier node.
pub fn shapes(max_internal: usize, max_clients: usize, max_capacity: u64, max_requests: u64) -> impl Strategy<Value = Shape> {
    (1..=max_internal).prop_flat_map(move |n| {
        (
            prop::collection::vec(any::<Index>(), n),
            prop::collection::vec(1..=max_capacity, n),
            prop::collection::vec(1..=4u64, n),
            prop::collection::vec((any::<Index>(), 0..=max_requests, 1..=4u64), 1..=max_clients),
        )
            .prop_map(|(parents, capacities, comms, clients)| Shape { parents, capacities, comms, clients })
    })
}

pub fn homogeneous_trees(max_internal: usize, max_clients: usize) -> impl Strategy<Value = DistributionTree> {
    shapes(max_internal, max_clients, 12, 12).prop_map(|s| build(&s, true))
}

pub fn heterogeneous_trees(max_internal: usize, max_clients: usize) -> impl Strategy<Value = DistributionTree> {
    shapes(max_internal, max_clients, 12, 12).prop_map(|s| build(&s, false))
}

pub fn assert_valid(tree: &DistributionTree, p: &Placement, a: &Assignment, policy: Policy, what: &str) {
    let report = validate_all(tree, p, a, policy, ConstraintProfile::NONE);
    assert!(report.is_ok(), "{what}: {report}\n{}", tree.to_text());
}

/// Maximum flow source -> clients -> servers on their path -> sink, by
/// shortest augmenting paths on a dense residual matrix.
pub fn max_servable(tree: &DistributionTree, placement: &Placement) -> u64 {
    let clients = tree.clients();
    let servers: Vec<_> = placement.iter().collect();
    let n = 2 + clients.len() + servers.len();
    let (source, sink) = (0, n - 1);
    let mut cap = vec![vec![0u64; n]; n];
    let unbounded = tree.total_requests() + 1;
    for (a, &c) in clients.iter().enumerate() {
        cap[source][1 + a] = tree.requests(c);
        for (b, &s) in servers.iter().enumerate() {
            if tree.is_ancestor(s, c) {
                cap[1 + a][1 + clients.len() + b] = unbounded;
            }
        }
    }
    for (b, &s) in servers.iter().enumerate() {
        cap[1 + clients.len() + b][sink] = tree.capacity(s);
    }
    let mut total = 0;
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if prev[v] == usize::MAX && cap[u][v] > 0 {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[sink] == usize::MAX {
            return total;
        }
        let mut push = u64::MAX;
        let mut v = sink;
        while v != source {
            push = push.min(cap[prev[v]][v]);
            v = prev[v];
        }
        let mut v = sink;
        while v != source {
            cap[prev[v]][v] -= push;
            cap[v][prev[v]] += push;
            v = prev[v];
        }
        total += push;
    }
}

use replica_placement::fixtures;
use replica_placement::lp::RelaxationMode;

pub struct LpCase {
    pub name: String,
    pub tree: DistributionTree,
    pub policy: Policy,
    pub mode: RelaxationMode,
}

pub fn small_fixtures() -> Vec<(&'static str, DistributionTree)> {
    vec![
        ("fig1a", fixtures::fig1a()),
        ("fig1b", fixtures::fig1b()),
        ("fig1c", fixtures::fig1c()),
        ("fig2_2", fixtures::fig2(2)),
        ("fig3_2", fixtures::fig3(2)),
        ("fig4_2_3", fixtures::fig4(2, 3)),
        ("fig5_2_4", fixtures::fig5(2, 4)),
        ("fig6", fixtures::fig6()),
    ]
}

/// Programs frozen under `tests/golden/`: the three two-node instances under
/// every policy, and both relaxations of the Multiple program of every
/// fixture.
pub fn lp_cases() -> Vec<LpCase> {
    let mut out = Vec::new();
    for (name, tree) in small_fixtures().into_iter().take(3) {
        for policy in Policy::ALL {
            out.push(LpCase { name: format!("{name}.{policy}.exact"), tree: tree.clone(), policy, mode: RelaxationMode::ExactInteger });
        }
    }
    for (name, tree) in small_fixtures() {
        for mode in [RelaxationMode::FullyRational, RelaxationMode::RefinedXInteger] {
            out.push(LpCase { name: format!("{name}.multiple.{mode}"), tree: tree.clone(), policy: Policy::Multiple, mode });
        }
    }
    out
}

pub fn crate_dir() -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}
