//! Distribution trees: internal nodes that may host a replica, leaf clients that
//! issue requests, and the links between them.
//!
//! Trees are immutable once built. Nodes are addressed by [`NodeIdx`], their
//! position in declaration order; since parents are always declared before their
//! children, a parent index is always smaller than the indices of its children.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use thiserror::Error;

use crate::num::{format_rational, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate node id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: node `{id}` refers to undeclared parent `{parent}`")]
    Orphan { line: usize, id: String, parent: String },
    #[error("line {line}: node `{id}` is its own parent")]
    Cycle { line: usize, id: String },
    #[error("line {line}: client `{parent}` cannot have children (`{id}`)")]
    ClientWithChildren { line: usize, id: String, parent: String },
    #[error("line {line}: `{id}` has no parent but the root is already declared")]
    MultipleRoots { line: usize, id: String },
    #[error("missing root: the first record must be a parentless internal node")]
    MissingRoot,
    #[error("tree has no clients")]
    NoClients,
    #[error("invalid node id `{0}`")]
    InvalidId(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("`{ancestor}` is not an ancestor of `{node}`")]
    NotAncestor { node: String, ancestor: String },
    #[error("total server capacity is zero")]
    ZeroCapacity,
}

/// Identifier of a node, unique within its tree.
///
/// Ids are made of ASCII letters, digits, `_` and `.` so they can be embedded
/// verbatim into solver variable names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Result<Self, TreeError> {
        let id = id.into();
        let valid = !id.is_empty()
            && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'.');
        if valid {
            Ok(NodeId(id))
        } else {
            Err(TreeError::InvalidId(id))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Position of a node in its tree (declaration order). Index 0 is the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeIdx(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Internal { capacity: u64, storage_cost: Rational },
    /// `qos = None` means the client has no QoS bound.
    Client { requests: u64, qos: Option<Rational> },
}

/// The link from a node to its parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    pub comm: Rational,
    /// `None` means unbounded bandwidth.
    pub bandwidth: Option<u64>,
}

impl Default for Link {
    fn default() -> Self {
        Link { comm: Rational::from_integer(1), bandwidth: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub parent: Option<NodeIdx>,
    /// Link to the parent; `None` only for the root.
    pub link: Option<Link>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionTree {
    nodes: Vec<Node>,
    children: Vec<Vec<NodeIdx>>,
    by_id: HashMap<NodeId, NodeIdx>,
    internal: Vec<NodeIdx>,
    clients: Vec<NodeIdx>,
    preorder: Vec<NodeIdx>,
    depth: Vec<usize>,
}

impl DistributionTree {
    pub fn root(&self) -> NodeIdx {
        NodeIdx(0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, idx: NodeIdx) -> &Node {
        &self.nodes[idx.0]
    }

    pub fn id(&self, idx: NodeIdx) -> &NodeId {
        &self.nodes[idx.0].id
    }

    pub fn lookup(&self, id: &str) -> Option<NodeIdx> {
        NodeId::new(id).ok().and_then(|id| self.by_id.get(&id).copied())
    }

    pub fn resolve(&self, id: &str) -> Result<NodeIdx, TreeError> {
        self.lookup(id).ok_or_else(|| TreeError::UnknownNode(id.to_string()))
    }

    pub fn contains(&self, idx: NodeIdx) -> bool {
        idx.0 < self.nodes.len()
    }

    pub fn is_client(&self, idx: NodeIdx) -> bool {
        matches!(self.nodes[idx.0].kind, NodeKind::Client { .. })
    }

    pub fn is_internal(&self, idx: NodeIdx) -> bool {
        !self.is_client(idx)
    }

    /// Server capacity `W_j`; zero for clients.
    pub fn capacity(&self, idx: NodeIdx) -> u64 {
        match self.nodes[idx.0].kind {
            NodeKind::Internal { capacity, .. } => capacity,
            NodeKind::Client { .. } => 0,
        }
    }

    pub fn storage_cost(&self, idx: NodeIdx) -> Rational {
        match self.nodes[idx.0].kind {
            NodeKind::Internal { storage_cost, .. } => storage_cost,
            NodeKind::Client { .. } => Rational::zero(),
        }
    }

    /// Requests per time unit `r_i`; zero for internal nodes.
    pub fn requests(&self, idx: NodeIdx) -> u64 {
        match self.nodes[idx.0].kind {
            NodeKind::Client { requests, .. } => requests,
            NodeKind::Internal { .. } => 0,
        }
    }

    pub fn qos(&self, idx: NodeIdx) -> Option<Rational> {
        match self.nodes[idx.0].kind {
            NodeKind::Client { qos, .. } => qos,
            NodeKind::Internal { .. } => None,
        }
    }

    pub fn parent(&self, idx: NodeIdx) -> Option<NodeIdx> {
        self.nodes[idx.0].parent
    }

    pub fn link(&self, idx: NodeIdx) -> Option<&Link> {
        self.nodes[idx.0].link.as_ref()
    }

    pub fn children(&self, idx: NodeIdx) -> &[NodeIdx] {
        &self.children[idx.0]
    }

    /// Internal nodes in declaration order.
    pub fn internal_nodes(&self) -> &[NodeIdx] {
        &self.internal
    }

    /// Clients in declaration order.
    pub fn clients(&self) -> &[NodeIdx] {
        &self.clients
    }

    /// Depth-first pre-order, children visited in declaration order.
    pub fn preorder(&self) -> &[NodeIdx] {
        &self.preorder
    }

    /// Depth-first post-order, children visited in declaration order.
    pub fn postorder(&self) -> Vec<NodeIdx> {
        let mut order = Vec::with_capacity(self.len());
        let mut stack = vec![(self.root(), 0usize)];
        while let Some((node, next)) = stack.pop() {
            if let Some(&child) = self.children[node.0].get(next) {
                stack.push((node, next + 1));
                stack.push((child, 0));
            } else {
                order.push(node);
            }
        }
        order
    }

    /// Number of links between `idx` and the root.
    pub fn depth(&self, idx: NodeIdx) -> usize {
        self.depth[idx.0]
    }

    pub fn ancestors_iter(&self, idx: NodeIdx) -> impl Iterator<Item = NodeIdx> + '_ {
        std::iter::successors(self.parent(idx), move |&k| self.parent(k))
    }

    /// Path from `parent(k)` up to the root, `k` excluded.
    pub fn ancestors(&self, idx: NodeIdx) -> Vec<NodeIdx> {
        self.ancestors_iter(idx).collect()
    }

    pub fn is_ancestor(&self, ancestor: NodeIdx, idx: NodeIdx) -> bool {
        self.depth[ancestor.0] < self.depth[idx.0]
            && self.ancestors_iter(idx).nth(self.depth[idx.0] - self.depth[ancestor.0] - 1)
                == Some(ancestor)
    }

    /// All clients of `subtree(j)` in depth-first order (`j` itself if it is a client).
    pub fn subtree_clients(&self, idx: NodeIdx) -> Vec<NodeIdx> {
        let mut out = Vec::new();
        let mut stack = vec![idx];
        while let Some(k) = stack.pop() {
            if self.is_client(k) {
                out.push(k);
            }
            stack.extend(self.children[k.0].iter().rev());
        }
        out
    }

    /// Sum of `comm` over the links from `i` up to its ancestor `j`.
    pub fn distance(&self, i: NodeIdx, j: NodeIdx) -> Result<Rational, TreeError> {
        if !self.is_ancestor(j, i) {
            return Err(TreeError::NotAncestor {
                node: self.id(i).to_string(),
                ancestor: self.id(j).to_string(),
            });
        }
        let mut total = Rational::zero();
        let mut k = i;
        while k != j {
            total += self.nodes[k.0].link.as_ref().map_or(Rational::zero(), |l| l.comm);
            k = self.nodes[k.0].parent.expect("ancestor lies above");
        }
        Ok(total)
    }

    pub fn total_requests(&self) -> u64 {
        self.clients.iter().map(|&c| self.requests(c)).sum()
    }

    pub fn total_capacity(&self) -> u64 {
        self.internal.iter().map(|&j| self.capacity(j)).sum()
    }

    pub fn total_storage_cost(&self) -> Rational {
        self.internal.iter().map(|&j| self.storage_cost(j)).sum()
    }

    /// Load `λ = Σ r_i / Σ W_j`.
    pub fn load_lambda(&self) -> Result<Rational, TreeError> {
        let capacity = self.total_capacity();
        if capacity == 0 {
            return Err(TreeError::ZeroCapacity);
        }
        Ok(Rational::new(self.total_requests() as i64, capacity as i64))
    }

    /// The common capacity `W` when every internal node has the same capacity.
    pub fn uniform_capacity(&self) -> Option<u64> {
        let first = self.capacity(self.internal[0]);
        self.internal.iter().all(|&j| self.capacity(j) == first).then_some(first)
    }

    /// Uniform capacities and unit storage costs.
    pub fn is_homogeneous(&self) -> bool {
        self.uniform_capacity().is_some()
            && self.internal.iter().all(|&j| self.storage_cost(j) == Rational::from_integer(1))
    }

    /// Serializes into the line-based tree format accepted by [`str::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for node in &self.nodes {
            out.push_str(&self.format_record(node));
            out.push('\n');
        }
        out
    }

    fn format_record(&self, node: &Node) -> String {
        let head = match &node.kind {
            NodeKind::Internal { capacity, storage_cost } => {
                format!("node {} {} {}", node.id, capacity, format_rational(storage_cost))
            }
            NodeKind::Client { requests, qos } => {
                format!("client {} requests {} qos {}", node.id, requests, format_limit(qos))
            }
        };
        match (node.parent, &node.link) {
            (Some(p), Some(link)) => format!(
                "{head} parent {} comm {} bw {}",
                self.id(p),
                format_rational(&link.comm),
                link.bandwidth.map_or_else(|| "inf".to_string(), |b| b.to_string())
            ),
            _ => head,
        }
    }
}

fn format_limit(value: &Option<Rational>) -> String {
    value.as_ref().map_or_else(|| "inf".to_string(), format_rational)
}

/// Incremental construction of a [`DistributionTree`]. Parents must be added
/// before their children; the first node added is the root.
#[derive(Debug, Default)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
    by_id: HashMap<NodeId, NodeIdx>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn root(&mut self, id: &str, capacity: u64, storage_cost: Rational) -> Result<NodeIdx, TreeError> {
        let line = self.nodes.len() + 1;
        if !self.nodes.is_empty() {
            return Err(TreeError::MultipleRoots { line, id: id.to_string() });
        }
        self.push(line, id, NodeKind::Internal { capacity, storage_cost }, None)
    }

    pub fn node(
        &mut self,
        id: &str,
        capacity: u64,
        storage_cost: Rational,
        parent: &str,
        link: Link,
    ) -> Result<NodeIdx, TreeError> {
        let line = self.nodes.len() + 1;
        self.push(line, id, NodeKind::Internal { capacity, storage_cost }, Some((parent, link)))
    }

    pub fn client(
        &mut self,
        id: &str,
        requests: u64,
        qos: Option<Rational>,
        parent: &str,
        link: Link,
    ) -> Result<NodeIdx, TreeError> {
        let line = self.nodes.len() + 1;
        self.push(line, id, NodeKind::Client { requests, qos }, Some((parent, link)))
    }

    fn push(
        &mut self,
        line: usize,
        id: &str,
        kind: NodeKind,
        parent: Option<(&str, Link)>,
    ) -> Result<NodeIdx, TreeError> {
        let node_id = NodeId::new(id)?;
        if self.by_id.contains_key(&node_id) {
            return Err(TreeError::DuplicateId { line, id: id.to_string() });
        }
        let (parent_idx, link) = match parent {
            None => {
                if matches!(kind, NodeKind::Client { .. }) {
                    return Err(TreeError::MissingRoot);
                }
                (None, None)
            }
            Some((pid, link)) => {
                if self.nodes.is_empty() {
                    return Err(TreeError::MissingRoot);
                }
                if pid == id {
                    return Err(TreeError::Cycle { line, id: id.to_string() });
                }
                let pidx = NodeId::new(pid)
                    .ok()
                    .and_then(|p| self.by_id.get(&p).copied())
                    .ok_or_else(|| TreeError::Orphan {
                        line,
                        id: id.to_string(),
                        parent: pid.to_string(),
                    })?;
                if matches!(self.nodes[pidx.0].kind, NodeKind::Client { .. }) {
                    return Err(TreeError::ClientWithChildren {
                        line,
                        id: id.to_string(),
                        parent: pid.to_string(),
                    });
                }
                (Some(pidx), Some(link))
            }
        };
        let idx = NodeIdx(self.nodes.len());
        self.by_id.insert(node_id.clone(), idx);
        self.nodes.push(Node { id: node_id, kind, parent: parent_idx, link });
        Ok(idx)
    }

    pub fn build(self) -> Result<DistributionTree, TreeError> {
        let nodes = self.nodes;
        if nodes.is_empty() {
            return Err(TreeError::MissingRoot);
        }
        let mut children = vec![Vec::new(); nodes.len()];
        let mut depth = vec![0usize; nodes.len()];
        let mut internal = Vec::new();
        let mut clients = Vec::new();
        for (k, node) in nodes.iter().enumerate() {
            if let Some(p) = node.parent {
                children[p.0].push(NodeIdx(k));
                depth[k] = depth[p.0] + 1;
            }
            match node.kind {
                NodeKind::Internal { .. } => internal.push(NodeIdx(k)),
                NodeKind::Client { .. } => clients.push(NodeIdx(k)),
            }
        }
        if clients.is_empty() {
            return Err(TreeError::NoClients);
        }
        let mut preorder = Vec::with_capacity(nodes.len());
        let mut stack = vec![NodeIdx(0)];
        while let Some(k) = stack.pop() {
            preorder.push(k);
            stack.extend(children[k.0].iter().rev());
        }
        Ok(DistributionTree {
            nodes,
            children,
            by_id: self.by_id,
            internal,
            clients,
            preorder,
            depth,
        })
    }
}

impl FromStr for DistributionTree {
    type Err = TreeError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut builder = TreeBuilder::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            let record = Record::parse(line, &tokens)?;
            let result = match record {
                Record::Node { id, capacity, storage_cost, parent: None } => {
                    if !builder.nodes.is_empty() {
                        return Err(TreeError::MultipleRoots { line, id: id.to_string() });
                    }
                    builder.push(line, id, NodeKind::Internal { capacity, storage_cost }, None)
                }
                Record::Node { id, capacity, storage_cost, parent: Some((pid, link)) } => {
                    builder.push(line, id, NodeKind::Internal { capacity, storage_cost }, Some((pid, link)))
                }
                Record::Client { id, requests, qos, parent, link } => {
                    builder.push(line, id, NodeKind::Client { requests, qos }, Some((parent, link)))
                }
            };
            result?;
        }
        builder.build()
    }
}

enum Record<'a> {
    Node { id: &'a str, capacity: u64, storage_cost: Rational, parent: Option<(&'a str, Link)> },
    Client { id: &'a str, requests: u64, qos: Option<Rational>, parent: &'a str, link: Link },
}

impl<'a> Record<'a> {
    fn parse(line: usize, tokens: &[&'a str]) -> Result<Self, TreeError> {
        let syntax = |message: String| TreeError::Syntax { line, message };
        match tokens[0] {
            "node" => {
                if tokens.len() != 4 && tokens.len() != 10 {
                    return Err(syntax(format!(
                        "expected `node <id> <capacity> <storage_cost> [parent <pid> comm <c> bw <b>]`, got {} fields",
                        tokens.len()
                    )));
                }
                let capacity = parse_count(tokens[2]).ok_or_else(|| syntax(format!("bad capacity `{}`", tokens[2])))?;
                let storage_cost =
                    parse_rational(tokens[3]).ok_or_else(|| syntax(format!("bad storage cost `{}`", tokens[3])))?;
                let parent = if tokens.len() == 10 {
                    Some(parse_parent(line, &tokens[4..])?)
                } else {
                    None
                };
                Ok(Record::Node { id: tokens[1], capacity, storage_cost, parent })
            }
            "client" => {
                if tokens.len() != 12 || tokens[2] != "requests" || tokens[4] != "qos" {
                    return Err(syntax(
                        "expected `client <id> requests <r> qos <q> parent <pid> comm <c> bw <b>`".to_string(),
                    ));
                }
                let requests = parse_count(tokens[3]).ok_or_else(|| syntax(format!("bad request count `{}`", tokens[3])))?;
                let qos = if tokens[5] == "inf" {
                    None
                } else {
                    let q = parse_rational(tokens[5]).ok_or_else(|| syntax(format!("bad qos `{}`", tokens[5])))?;
                    if q <= Rational::zero() {
                        return Err(syntax("qos must be positive".to_string()));
                    }
                    Some(q)
                };
                let (parent, link) = parse_parent(line, &tokens[6..])?;
                Ok(Record::Client { id: tokens[1], requests, qos, parent, link })
            }
            other => Err(syntax(format!("unknown record `{other}`"))),
        }
    }
}

fn parse_parent<'a>(line: usize, tokens: &[&'a str]) -> Result<(&'a str, Link), TreeError> {
    let syntax = |message: String| TreeError::Syntax { line, message };
    if tokens.len() != 6 || tokens[0] != "parent" || tokens[2] != "comm" || tokens[4] != "bw" {
        return Err(syntax("expected `parent <pid> comm <c> bw <b>`".to_string()));
    }
    let comm = parse_rational(tokens[3]).ok_or_else(|| syntax(format!("bad comm `{}`", tokens[3])))?;
    let bandwidth = if tokens[5] == "inf" {
        None
    } else {
        let b = parse_count(tokens[5]).ok_or_else(|| syntax(format!("bad bandwidth `{}`", tokens[5])))?;
        if b == 0 {
            return Err(syntax("bandwidth must be positive".to_string()));
        }
        Some(b)
    };
    Ok((tokens[1], Link { comm, bandwidth }))
}

fn parse_count(text: &str) -> Option<u64> {
    if text.bytes().all(|b| b.is_ascii_digit()) {
        text.parse().ok()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1b() -> DistributionTree {
        "node s2 1 1\nnode s1 1 1 parent s2 comm 1 bw inf\n\
         client c1 requests 1 qos inf parent s1 comm 1 bw inf\n\
         client c2 requests 1 qos inf parent s1 comm 1 bw inf\n"
            .parse()
            .unwrap()
    }

    #[test]
    fn smallest_legal_tree() {
        let tree: DistributionTree =
            "node n1 1 1\nclient c1 requests 1 qos inf parent n1 comm 1 bw inf".parse().unwrap();
        assert_eq!(tree.internal_nodes().len(), 1);
        assert_eq!(tree.clients().len(), 1);
    }

    #[test]
    fn parses_fig1b_encoding() {
        let tree = fig1b();
        assert_eq!(tree.internal_nodes().len(), 2);
        assert_eq!(tree.clients().len(), 2);
        assert_eq!(tree.id(tree.root()).as_str(), "s2");
    }

    #[test]
    fn rejects_client_with_children() {
        let err = "node n1 1 1\nclient c1 requests 1 qos inf parent n1 comm 1 bw inf\n\
                   node n2 1 1 parent c1 comm 1 bw inf"
            .parse::<DistributionTree>()
            .unwrap_err();
        assert!(matches!(err, TreeError::ClientWithChildren { line: 3, .. }), "{err}");
        assert!(err.to_string().contains("cannot have children"));
    }

    #[test]
    fn reports_structural_errors() {
        let dup = "node a 1 1\nnode a 1 1 parent a comm 1 bw inf".parse::<DistributionTree>();
        assert!(matches!(dup, Err(TreeError::DuplicateId { line: 2, .. })));
        let orphan = "node a 1 1\nclient c requests 1 qos inf parent zz comm 1 bw inf".parse::<DistributionTree>();
        assert!(matches!(orphan, Err(TreeError::Orphan { line: 2, .. })));
        let cycle = "node a 1 1\nnode b 1 1 parent b comm 1 bw inf".parse::<DistributionTree>();
        assert!(matches!(cycle, Err(TreeError::Cycle { line: 2, .. })));
        let noroot = "client c requests 1 qos inf parent a comm 1 bw inf".parse::<DistributionTree>();
        assert_eq!(noroot, Err(TreeError::MissingRoot));
        assert_eq!("# nothing\n".parse::<DistributionTree>(), Err(TreeError::MissingRoot));
        let two_roots = "node a 1 1\nnode b 1 1".parse::<DistributionTree>();
        assert!(matches!(two_roots, Err(TreeError::MultipleRoots { line: 2, .. })));
        let syntax = "node a 1\n".parse::<DistributionTree>();
        assert!(matches!(syntax, Err(TreeError::Syntax { line: 1, .. })));
        assert_eq!("node a 1 1".parse::<DistributionTree>(), Err(TreeError::NoClients));
    }

    #[test]
    fn ancestors_are_bottom_up() {
        let tree = fig1b();
        let c1 = tree.resolve("c1").unwrap();
        let ids: Vec<_> = tree.ancestors(c1).iter().map(|&k| tree.id(k).to_string()).collect();
        assert_eq!(ids, ["s1", "s2"]);
        assert!(tree.ancestors(tree.root()).is_empty());
        assert!(matches!(tree.resolve("nope"), Err(TreeError::UnknownNode(_))));
    }

    #[test]
    fn subtree_clients_of_leaf_and_root() {
        let tree = fig1b();
        let c1 = tree.resolve("c1").unwrap();
        assert_eq!(tree.subtree_clients(c1), vec![c1]);
        assert_eq!(tree.subtree_clients(tree.root()), tree.clients().to_vec());
    }

    #[test]
    fn distance_sums_comm() {
        let tree: DistributionTree = "node r 1 1\nnode m 1 1 parent r comm 0.25 bw inf\n\
             client c requests 1 qos inf parent m comm 0.5 bw inf"
            .parse()
            .unwrap();
        let c = tree.resolve("c").unwrap();
        let m = tree.resolve("m").unwrap();
        assert_eq!(tree.distance(c, m).unwrap(), Rational::new(1, 2));
        assert_eq!(tree.distance(c, tree.root()).unwrap(), Rational::new(3, 4));
        assert!(matches!(tree.distance(m, c), Err(TreeError::NotAncestor { .. })));
        assert!(matches!(tree.distance(c, c), Err(TreeError::NotAncestor { .. })));
    }

    #[test]
    fn lambda_of_fig1a_and_zero_requests() {
        let tree: DistributionTree = "node s2 1 1\nnode s1 1 1 parent s2 comm 1 bw inf\n\
             client c requests 1 qos inf parent s1 comm 1 bw inf"
            .parse()
            .unwrap();
        assert_eq!(tree.load_lambda().unwrap(), Rational::new(1, 2));
        let idle: DistributionTree =
            "node s 3 1\nclient c requests 0 qos inf parent s comm 1 bw inf".parse().unwrap();
        assert_eq!(idle.load_lambda().unwrap(), Rational::zero());
        let dead: DistributionTree =
            "node s 0 1\nclient c requests 0 qos inf parent s comm 1 bw inf".parse().unwrap();
        assert_eq!(dead.load_lambda(), Err(TreeError::ZeroCapacity));
    }

    #[test]
    fn comments_and_inf_limits() {
        let tree: DistributionTree = "# header\nnode r 2 1.5 # root\n\
             client c requests 2 qos 3.5 parent r comm 1 bw 4\n"
            .parse()
            .unwrap();
        let c = tree.resolve("c").unwrap();
        assert_eq!(tree.qos(c), Some(Rational::new(7, 2)));
        assert_eq!(tree.link(c).unwrap().bandwidth, Some(4));
        assert_eq!(tree.storage_cost(tree.root()), Rational::new(3, 2));
        assert_eq!(tree.to_text().parse::<DistributionTree>().unwrap(), tree);
    }
}
