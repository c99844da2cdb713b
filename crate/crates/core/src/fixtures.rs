//! Small hand-built instances that separate the access policies, plus the
//! worked example used to illustrate the optimal Multiple algorithm.
//!
//! All links have `comm = 1` and unbounded bandwidth, clients have no QoS bound.

use crate::num::Rational;
use crate::tree::{DistributionTree, Link, TreeBuilder};

fn unit() -> Rational {
    Rational::from_integer(1)
}

fn int(v: u64) -> Rational {
    Rational::from_integer(v as i64)
}

/// Two nodes `s1 -> s2` with `W = 1`; `s1` carries the given client loads.
fn two_nodes(clients: &[u64]) -> DistributionTree {
    let mut b = TreeBuilder::new();
    b.root("s2", 1, unit()).unwrap();
    b.node("s1", 1, unit(), "s2", Link::default()).unwrap();
    for (k, &r) in clients.iter().enumerate() {
        b.client(&format!("c{}", k + 1), r, None, "s1", Link::default()).unwrap();
    }
    b.build().unwrap()
}

/// One client with one request: every policy has a solution.
pub fn fig1a() -> DistributionTree {
    two_nodes(&[1])
}

/// Two clients with one request each: no Closest solution.
pub fn fig1b() -> DistributionTree {
    two_nodes(&[1, 1])
}

/// One client with two requests: only Multiple has a solution.
pub fn fig1c() -> DistributionTree {
    two_nodes(&[2])
}

/// Upwards versus Closest: `2n+2` nodes with `W = n`, `2n+1` unit clients.
///
/// The root `s{2n+2}` has one client `c0` and one child `s{2n+1}`, whose
/// children `s1..s{2n}` each hold a single client `c{j}`.
pub fn fig2(n: u64) -> DistributionTree {
    assert!(n >= 1);
    let top = 2 * n + 2;
    let mid = 2 * n + 1;
    let mut b = TreeBuilder::new();
    let root = format!("s{top}");
    let hub = format!("s{mid}");
    b.root(&root, n, unit()).unwrap();
    b.client("c0", 1, None, &root, Link::default()).unwrap();
    b.node(&hub, n, unit(), &root, Link::default()).unwrap();
    for j in 1..=2 * n {
        let s = format!("s{j}");
        b.node(&s, n, unit(), &hub, Link::default()).unwrap();
        b.client(&format!("c{j}"), 1, None, &s, Link::default()).unwrap();
    }
    b.build().unwrap()
}

/// Multiple versus Upwards, homogeneous: `3n+1` nodes with `W = 2n`.
///
/// Root `r` holds client `cr` (n requests) and children `s1..sn`; each `sj`
/// has children `vj` (client `cvj`, n requests) and `wj` (client `cwj`, n+1).
pub fn fig3(n: u64) -> DistributionTree {
    assert!(n >= 1);
    let w = 2 * n;
    let mut b = TreeBuilder::new();
    b.root("r", w, unit()).unwrap();
    for j in 1..=n {
        let s = format!("s{j}");
        let v = format!("v{j}");
        let x = format!("w{j}");
        b.node(&s, w, unit(), "r", Link::default()).unwrap();
        b.node(&v, w, unit(), &s, Link::default()).unwrap();
        b.client(&format!("cv{j}"), n, None, &v, Link::default()).unwrap();
        b.node(&x, w, unit(), &s, Link::default()).unwrap();
        b.client(&format!("cw{j}"), n + 1, None, &x, Link::default()).unwrap();
    }
    b.client("cr", n, None, "r", Link::default()).unwrap();
    b.build().unwrap()
}

/// Multiple versus Upwards, heterogeneous (`sc_j = W_j`).
///
/// Chain `s1 -> s2 -> s3` rooted at `s1`, with `W1 = W2 = n` and `W3 = Kn`.
/// The root holds client `c1` with `n-1` requests, `s3` holds `c2` with `n+1`.
pub fn fig4(n: u64, k: u64) -> DistributionTree {
    assert!(n >= 1 && k >= 1);
    let mut b = TreeBuilder::new();
    b.root("s1", n, int(n)).unwrap();
    b.client("c1", n - 1, None, "s1", Link::default()).unwrap();
    b.node("s2", n, int(n), "s1", Link::default()).unwrap();
    b.node("s3", k * n, int(k * n), "s2", Link::default()).unwrap();
    b.client("c2", n + 1, None, "s3", Link::default()).unwrap();
    b.build().unwrap()
}

/// Gap between the naive lower bound and the optimum: `n+1` nodes with
/// capacity `w` (divisible by `n`). The root holds client `c0` with `w`
/// requests; each child `sj` holds one client with `w/n` requests.
pub fn fig5(n: u64, w: u64) -> DistributionTree {
    assert!(n >= 1 && w.is_multiple_of(n));
    let mut b = TreeBuilder::new();
    b.root("r", w, unit()).unwrap();
    b.client("c0", w, None, "r", Link::default()).unwrap();
    for j in 1..=n {
        let s = format!("s{j}");
        b.node(&s, w, unit(), "r", Link::default()).unwrap();
        b.client(&format!("c{j}"), w / n, None, &s, Link::default()).unwrap();
    }
    b.build().unwrap()
}

/// Worked example for the optimal Multiple algorithm, `W = 10`.
///
/// ```text
/// n1 ── n2 ── n10 ── a(12)
///  │     └── b(4)
///  ├─ n3 ── n4 ── e(7)
///  │     └── d(10)
///  └─ x(5)
/// ```
///
/// Pass 1 saturates `n10`, `n3` and `n1`, leaving 8 requests at the root.
/// Pass 2 picks `n4` (useful flow 7), then `n2` (useful flow 1).
pub fn fig6() -> DistributionTree {
    let mut b = TreeBuilder::new();
    b.root("n1", 10, unit()).unwrap();
    b.node("n2", 10, unit(), "n1", Link::default()).unwrap();
    b.node("n10", 10, unit(), "n2", Link::default()).unwrap();
    b.client("a", 12, None, "n10", Link::default()).unwrap();
    b.client("b", 4, None, "n2", Link::default()).unwrap();
    b.node("n3", 10, unit(), "n1", Link::default()).unwrap();
    b.node("n4", 10, unit(), "n3", Link::default()).unwrap();
    b.client("e", 7, None, "n4", Link::default()).unwrap();
    b.client("d", 10, None, "n3", Link::default()).unwrap();
    b.client("x", 5, None, "n1", Link::default()).unwrap();
    b.build().unwrap()
}
