//! Constraint checks for a (placement, assignment) pair and placement costs.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use thiserror::Error;

use crate::num::{format_rational, Rational};
use crate::solution::{Assignment, Placement};
use crate::tree::{DistributionTree, NodeIdx};

/// Server access policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Policy {
    /// Each client is served by the first replica on its path to the root.
    Closest,
    /// Each client is served by a single replica anywhere on its path.
    Upwards,
    /// A client's requests may be split among replicas on its path.
    Multiple,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Closest, Policy::Upwards, Policy::Multiple];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Closest => "closest",
            Policy::Upwards => "upwards",
            Policy::Multiple => "multiple",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "closest" => Ok(Policy::Closest),
            "upwards" => Ok(Policy::Upwards),
            "multiple" => Ok(Policy::Multiple),
            other => Err(format!("unknown policy `{other}` (expected closest, upwards or multiple)")),
        }
    }
}

/// Which optional constraint families are enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct ConstraintProfile {
    pub qos: bool,
    pub bandwidth: bool,
}

impl ConstraintProfile {
    pub const NONE: ConstraintProfile = ConstraintProfile { qos: false, bandwidth: false };
}

impl fmt::Display for ConstraintProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match (self.qos, self.bandwidth) {
            (false, false) => "none",
            (true, false) => "qos",
            (false, true) => "bw",
            (true, true) => "qos+bw",
        })
    }
}

impl FromStr for ConstraintProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(ConstraintProfile::NONE),
            "qos" => Ok(ConstraintProfile { qos: true, bandwidth: false }),
            "bw" => Ok(ConstraintProfile { qos: false, bandwidth: true }),
            "qos+bw" | "bw+qos" => Ok(ConstraintProfile { qos: true, bandwidth: true }),
            other => Err(format!("unknown profile `{other}` (expected none, qos, bw or qos+bw)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    UnknownNode,
    NotAClient,
    NotAServer,
    /// Server is not an ancestor of the client.
    NotOnPath,
    /// Server processes requests without holding a replica.
    NotInPlacement,
    /// `Σ_s r_{i,s} ≠ r_i`.
    Incomplete,
    Capacity,
    Qos,
    Bandwidth,
    /// More than one server under a single-server policy.
    MultipleServers,
    /// A replica lies strictly between the client and its server.
    NotClosest,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: String,
    pub measured: Rational,
    pub limit: Rational,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} at {}: measured {}, limit {}",
            self.kind,
            self.location,
            format_rational(&self.measured),
            format_rational(&self.limit)
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    fn push(&mut self, kind: ViolationKind, location: String, measured: impl Into<Rational>, limit: impl Into<Rational>) {
        self.violations.push(Violation { kind, location, measured: measured.into(), limit: limit.into() });
    }

    fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return writeln!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("assignment references unknown node index {0}")]
    UnknownNode(usize),
}

fn count(v: u64) -> Rational {
    Rational::from_integer(v as i64)
}

fn ensure_known(tree: &DistributionTree, placement: &Placement, assignment: &Assignment) -> Result<(), ValidationError> {
    for node in placement.iter().chain(assignment.iter().flat_map(|(c, s, _)| [c, s])) {
        if !tree.contains(node) {
            return Err(ValidationError::UnknownNode(node.0));
        }
    }
    Ok(())
}

/// Node kinds, path membership, placement membership and completeness.
pub fn check_structure(tree: &DistributionTree, placement: &Placement, assignment: &Assignment) -> ValidationReport {
    let mut report = ValidationReport::default();
    for r in placement.iter() {
        if !tree.contains(r) {
            report.push(ViolationKind::UnknownNode, format!("#{}", r.0), 0, 0);
        } else if !tree.is_internal(r) {
            report.push(ViolationKind::NotAServer, tree.id(r).to_string(), 0, 0);
        }
    }
    for (c, s, n) in assignment.iter() {
        if !tree.contains(c) || !tree.contains(s) {
            let bad = if tree.contains(c) { s } else { c };
            report.push(ViolationKind::UnknownNode, format!("#{}", bad.0), count(n), 0);
            continue;
        }
        let here = format!("{}->{}", tree.id(c), tree.id(s));
        if !tree.is_client(c) {
            report.push(ViolationKind::NotAClient, here.clone(), count(n), 0);
        }
        if !tree.is_internal(s) {
            report.push(ViolationKind::NotAServer, here.clone(), count(n), 0);
        } else if !tree.is_ancestor(s, c) {
            report.push(ViolationKind::NotOnPath, here.clone(), count(n), 0);
        }
        if !placement.contains(s) {
            report.push(ViolationKind::NotInPlacement, here, count(n), 0);
        }
    }
    for &c in tree.clients() {
        let served = assignment.served_total(c);
        let wanted = tree.requests(c);
        if served != wanted {
            report.push(ViolationKind::Incomplete, tree.id(c).to_string(), count(served), count(wanted));
        }
    }
    report
}

/// `Σ_i r_{i,s} ≤ W_s` for every server.
pub fn check_capacity(
    tree: &DistributionTree,
    placement: &Placement,
    assignment: &Assignment,
) -> Result<ValidationReport, ValidationError> {
    ensure_known(tree, placement, assignment)?;
    let mut report = ValidationReport::default();
    let loads = assignment.loads(tree.len());
    for (k, &load) in loads.iter().enumerate() {
        let node = NodeIdx(k);
        if load > tree.capacity(node) {
            report.push(ViolationKind::Capacity, tree.id(node).to_string(), count(load), count(tree.capacity(node)));
        }
    }
    Ok(report)
}

/// `distance(i, s) ≤ q_i` for every served pair. Unbounded QoS always passes.
pub fn check_qos(tree: &DistributionTree, assignment: &Assignment) -> Result<ValidationReport, ValidationError> {
    ensure_known(tree, &Placement::new(), assignment)?;
    let mut report = ValidationReport::default();
    for (c, s, _) in assignment.iter() {
        let Some(q) = tree.qos(c) else { continue };
        if let Ok(d) = tree.distance(c, s) {
            if d > q {
                report.push(ViolationKind::Qos, format!("{}->{}", tree.id(c), tree.id(s)), d, q);
            }
        }
    }
    Ok(report)
}

/// Requests crossing each link, indexed by the link's child node.
pub fn link_traffic(tree: &DistributionTree, assignment: &Assignment) -> Vec<u64> {
    let mut traffic = vec![0u64; tree.len()];
    for (c, s, n) in assignment.iter() {
        if !tree.contains(c) || !tree.contains(s) || !tree.is_ancestor(s, c) {
            continue;
        }
        let mut k = c;
        while k != s {
            traffic[k.0] += n;
            k = tree.parent(k).expect("server is an ancestor");
        }
    }
    traffic
}

/// Traffic on every link bounded by its bandwidth.
pub fn check_bandwidth(tree: &DistributionTree, assignment: &Assignment) -> Result<ValidationReport, ValidationError> {
    ensure_known(tree, &Placement::new(), assignment)?;
    let mut report = ValidationReport::default();
    for (k, &t) in link_traffic(tree, assignment).iter().enumerate() {
        let node = NodeIdx(k);
        let Some(bw) = tree.link(node).and_then(|l| l.bandwidth) else { continue };
        if t > bw {
            let parent = tree.parent(node).expect("non-root has a link");
            report.push(
                ViolationKind::Bandwidth,
                format!("{}->{}", tree.id(node), tree.id(parent)),
                count(t),
                count(bw),
            );
        }
    }
    Ok(report)
}

/// Shape constraints of the access policy. Completeness is part of
/// [`check_structure`]; this only adds the single-server and closest rules.
pub fn check_policy(
    tree: &DistributionTree,
    placement: &Placement,
    assignment: &Assignment,
    policy: Policy,
) -> Result<ValidationReport, ValidationError> {
    ensure_known(tree, placement, assignment)?;
    let mut report = ValidationReport::default();
    if policy == Policy::Multiple {
        return Ok(report);
    }
    for &c in tree.clients() {
        let servers = assignment.servers_of(c);
        if servers.len() > 1 {
            report.push(ViolationKind::MultipleServers, tree.id(c).to_string(), count(servers.len() as u64), 1);
        }
        if policy != Policy::Closest {
            continue;
        }
        for (s, _) in servers {
            if !tree.is_ancestor(s, c) {
                continue;
            }
            let closer = tree.ancestors_iter(c).take_while(|&a| a != s).find(|&a| placement.contains(a));
            if let Some(a) = closer {
                report.push(
                    ViolationKind::NotClosest,
                    format!("{}->{} (replica {} is closer)", tree.id(c), tree.id(s), tree.id(a)),
                    count((tree.depth(c) - tree.depth(s)) as u64),
                    count((tree.depth(c) - tree.depth(a)) as u64),
                );
            }
        }
    }
    Ok(report)
}

/// `Σ_{s∈R} sc_s`.
pub fn placement_cost(tree: &DistributionTree, placement: &Placement) -> Rational {
    placement.iter().filter(|&r| tree.contains(r)).map(|r| tree.storage_cost(r)).fold(Rational::zero(), |a, b| a + b)
}

/// All checks at once; every problem, including unknown nodes, becomes a violation.
pub fn validate_all(
    tree: &DistributionTree,
    placement: &Placement,
    assignment: &Assignment,
    policy: Policy,
    profile: ConstraintProfile,
) -> ValidationReport {
    let mut report = check_structure(tree, placement, assignment);
    if report.count(ViolationKind::UnknownNode) > 0 {
        return report;
    }
    let known = "structure checked above";
    report.extend(check_capacity(tree, placement, assignment).expect(known));
    report.extend(check_policy(tree, placement, assignment, policy).expect(known));
    if profile.qos {
        report.extend(check_qos(tree, assignment).expect(known));
    }
    if profile.bandwidth {
        report.extend(check_bandwidth(tree, assignment).expect(known));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::tree::TreeBuilder;
    use crate::tree::Link;

    fn idx(tree: &DistributionTree, id: &str) -> NodeIdx {
        tree.resolve(id).unwrap()
    }

    fn placement(tree: &DistributionTree, ids: &[&str]) -> Placement {
        ids.iter().map(|id| idx(tree, id)).collect()
    }

    #[test]
    fn fig1c_capacity() {
        let tree = fixtures::fig1c();
        let p = placement(&tree, &["s1", "s2"]);
        let (c, s1, s2) = (idx(&tree, "c1"), idx(&tree, "s1"), idx(&tree, "s2"));
        let mut split = Assignment::new();
        split.add(c, s1, 1);
        split.add(c, s2, 1);
        assert!(check_capacity(&tree, &p, &split).unwrap().is_ok());
        let mut lumped = Assignment::new();
        lumped.add(c, s1, 2);
        let report = check_capacity(&tree, &p, &lumped).unwrap();
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!((v.kind, v.location.as_str()), (ViolationKind::Capacity, "s1"));
        assert_eq!((v.measured, v.limit), (count(2), count(1)));
    }

    #[test]
    fn empty_assignment_on_idle_tree() {
        let tree: DistributionTree =
            "node r 1 1\nclient c requests 0 qos inf parent r comm 1 bw inf".parse().unwrap();
        let report = validate_all(&tree, &Placement::new(), &Assignment::new(), Policy::Closest, ConstraintProfile::NONE);
        assert!(report.is_ok());
    }

    #[test]
    fn unknown_nodes_are_errors_or_violations() {
        let tree = fixtures::fig1a();
        let mut a = Assignment::new();
        a.add(NodeIdx(2), NodeIdx(99), 1);
        assert_eq!(check_capacity(&tree, &Placement::new(), &a), Err(ValidationError::UnknownNode(99)));
        let report = validate_all(&tree, &Placement::new(), &a, Policy::Multiple, ConstraintProfile::NONE);
        assert_eq!(report.count(ViolationKind::UnknownNode), 1);
    }

    fn chain_with_qos(q: &str) -> DistributionTree {
        format!(
            "node g 5 1\nnode p 5 1 parent g comm 1 bw 4\nclient c requests 5 qos {q} parent p comm 1 bw 4\n"
        )
        .parse()
        .unwrap()
    }

    #[test]
    fn qos_checks() {
        let tree = chain_with_qos("1");
        let mut a = Assignment::new();
        a.add(idx(&tree, "c"), idx(&tree, "g"), 5);
        let report = check_qos(&tree, &a).unwrap();
        assert_eq!(report.count(ViolationKind::Qos), 1);
        assert_eq!(report.violations[0].measured, count(2));
        let free = chain_with_qos("inf");
        let mut a = Assignment::new();
        a.add(idx(&free, "c"), idx(&free, "g"), 5);
        assert!(check_qos(&free, &a).unwrap().is_ok());
    }

    #[test]
    fn qos_on_fig2_local_servers() {
        let base = fixtures::fig2(2);
        let text = base.to_text().replace("qos inf", "qos 1");
        let tree: DistributionTree = text.parse().unwrap();
        let mut a = Assignment::new();
        for &c in tree.clients() {
            a.add(c, tree.parent(c).unwrap(), 1);
        }
        assert!(check_qos(&tree, &a).unwrap().is_ok());
    }

    #[test]
    fn bandwidth_checks() {
        let tree = chain_with_qos("inf");
        let mut a = Assignment::new();
        a.add(idx(&tree, "c"), idx(&tree, "g"), 5);
        let report = check_bandwidth(&tree, &a).unwrap();
        assert_eq!(report.count(ViolationKind::Bandwidth), 2);
        assert!(report.violations.iter().all(|v| v.measured == count(5) && v.limit == count(4)));
        let mut b = TreeBuilder::new();
        b.root("r", 1, Rational::from_integer(1)).unwrap();
        b.client("c", 1, None, "r", Link::default()).unwrap();
        let open = b.build().unwrap();
        let mut a = Assignment::new();
        a.add(idx(&open, "c"), open.root(), 1);
        assert!(check_bandwidth(&open, &a).unwrap().is_ok());
    }

    #[test]
    fn fig1b_upwards_traffic() {
        let text = fixtures::fig1b().to_text().replace("node s1 1 1 parent s2 comm 1 bw inf", "node s1 1 1 parent s2 comm 1 bw 1");
        let tree: DistributionTree = text.parse().unwrap();
        let p = placement(&tree, &["s1", "s2"]);
        let mut a = Assignment::new();
        a.add(idx(&tree, "c1"), idx(&tree, "s1"), 1);
        a.add(idx(&tree, "c2"), idx(&tree, "s2"), 1);
        assert_eq!(link_traffic(&tree, &a)[idx(&tree, "s1").0], 1);
        let profile = ConstraintProfile { qos: false, bandwidth: true };
        assert!(validate_all(&tree, &p, &a, Policy::Upwards, profile).is_ok());
    }

    #[test]
    fn policy_shapes() {
        let tree = fixtures::fig1c();
        let p = placement(&tree, &["s1", "s2"]);
        let (c, s1, s2) = (idx(&tree, "c1"), idx(&tree, "s1"), idx(&tree, "s2"));
        let mut split = Assignment::new();
        split.add(c, s1, 1);
        split.add(c, s2, 1);
        assert!(check_policy(&tree, &p, &split, Policy::Multiple).unwrap().is_ok());
        let report = check_policy(&tree, &p, &split, Policy::Upwards).unwrap();
        assert_eq!(report.count(ViolationKind::MultipleServers), 1);

        let tree = fixtures::fig1a();
        let p = placement(&tree, &["s1", "s2"]);
        let mut high = Assignment::new();
        high.add(idx(&tree, "c1"), idx(&tree, "s2"), 1);
        assert!(check_policy(&tree, &p, &high, Policy::Upwards).unwrap().is_ok());
        let report = check_policy(&tree, &p, &high, Policy::Closest).unwrap();
        assert_eq!(report.count(ViolationKind::NotClosest), 1);

        let root_only = placement(&tree, &["s2"]);
        for policy in Policy::ALL {
            let report = validate_all(&tree, &root_only, &high, policy, ConstraintProfile::NONE);
            assert!(report.is_ok(), "{policy}: {report}");
        }
    }

    #[test]
    fn costs_on_fig4() {
        let n = 2;
        let k = 3;
        let tree = fixtures::fig4(n, k);
        assert_eq!(placement_cost(&tree, &Placement::new()), Rational::zero());
        assert_eq!(placement_cost(&tree, &placement(&tree, &["s1", "s2"])), count(2 * n));
        assert_eq!(placement_cost(&tree, &placement(&tree, &["s1", "s3"])), count((k + 1) * n));
    }

    #[test]
    fn capacity_failures_on_fixtures() {
        let tree = fixtures::fig1b();
        let s2 = idx(&tree, "s2");
        let mut a = Assignment::new();
        a.add(idx(&tree, "c1"), s2, 1);
        a.add(idx(&tree, "c2"), s2, 1);
        let report = validate_all(&tree, &placement(&tree, &["s2"]), &a, Policy::Multiple, ConstraintProfile::NONE);
        assert_eq!(report.count(ViolationKind::Capacity), 1);

        let w = 4;
        let tree = fixtures::fig5(2, w);
        let root = tree.root();
        let mut a = Assignment::new();
        for &c in tree.clients() {
            a.add(c, root, tree.requests(c));
        }
        let report = validate_all(&tree, &placement(&tree, &["r"]), &a, Policy::Multiple, ConstraintProfile::NONE);
        assert_eq!(report.count(ViolationKind::Capacity), 1);
        assert_eq!(report.violations[0].measured, count(2 * w));
    }

    #[test]
    fn structural_violations() {
        let tree = fixtures::fig1a();
        let (c, s1, s2) = (idx(&tree, "c1"), idx(&tree, "s1"), idx(&tree, "s2"));
        let mut a = Assignment::new();
        a.add(c, s1, 1);
        let report = check_structure(&tree, &placement(&tree, &["s2"]), &a);
        assert_eq!(report.count(ViolationKind::NotInPlacement), 1);
        let mut a = Assignment::new();
        a.add(c, s2, 2);
        let report = check_structure(&tree, &placement(&tree, &["s2"]), &a);
        assert_eq!(report.count(ViolationKind::Incomplete), 1);
    }
}
