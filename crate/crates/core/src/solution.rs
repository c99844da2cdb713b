//! Replica placements, request assignments and the solution file format.
//!
//! ```text
//! replica s1
//! replica s2
//! assign c1 s1 1
//! assign c1 s2 1
//! ```

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::tree::{DistributionTree, NodeIdx};

/// The set `R` of internal nodes holding a replica.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Placement {
    replicas: BTreeSet<NodeIdx>,
}

impl Placement {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, node: NodeIdx) -> bool {
        self.replicas.insert(node)
    }

    pub fn contains(&self, node: NodeIdx) -> bool {
        self.replicas.contains(&node)
    }

    pub fn len(&self) -> usize {
        self.replicas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replicas.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeIdx> + '_ {
        self.replicas.iter().copied()
    }
}

impl FromIterator<NodeIdx> for Placement {
    fn from_iter<I: IntoIterator<Item = NodeIdx>>(iter: I) -> Self {
        Placement { replicas: iter.into_iter().collect() }
    }
}

/// Requests `r_{i,s}` of client `i` processed by server `s`. Only strictly
/// positive entries are stored; `Servers(i)` is derived from them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    served: BTreeMap<(NodeIdx, NodeIdx), u64>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count` requests of `client` to `server`. Zero counts are ignored.
    pub fn add(&mut self, client: NodeIdx, server: NodeIdx, count: u64) {
        if count > 0 {
            *self.served.entry((client, server)).or_insert(0) += count;
        }
    }

    pub fn get(&self, client: NodeIdx, server: NodeIdx) -> u64 {
        self.served.get(&(client, server)).copied().unwrap_or(0)
    }

    /// `(client, server, count)` triples ordered by client then server index.
    pub fn iter(&self) -> impl Iterator<Item = (NodeIdx, NodeIdx, u64)> + '_ {
        self.served.iter().map(|(&(c, s), &n)| (c, s, n))
    }

    pub fn len(&self) -> usize {
        self.served.len()
    }

    pub fn is_empty(&self) -> bool {
        self.served.is_empty()
    }

    pub fn servers_of(&self, client: NodeIdx) -> Vec<(NodeIdx, u64)> {
        self.served
            .range((client, NodeIdx(0))..=(client, NodeIdx(usize::MAX)))
            .map(|(&(_, s), &n)| (s, n))
            .collect()
    }

    pub fn served_total(&self, client: NodeIdx) -> u64 {
        self.servers_of(client).iter().map(|&(_, n)| n).sum()
    }

    /// Total requests processed by each node, indexed by node position.
    pub fn loads(&self, node_count: usize) -> Vec<u64> {
        let mut loads = vec![0u64; node_count];
        for (_, s, n) in self.iter() {
            if let Some(slot) = loads.get_mut(s.0) {
                *slot += n;
            }
        }
        loads
    }

    /// Nodes that process at least one request.
    pub fn used_servers(&self) -> Placement {
        self.iter().map(|(_, s, _)| s).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolutionError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown node `{id}`")]
    UnknownNode { line: usize, id: String },
    #[error("line {line}: `{id}` is not an internal node")]
    NotInternal { line: usize, id: String },
    #[error("line {line}: `{id}` is not a client")]
    NotClient { line: usize, id: String },
}

pub fn parse_solution(text: &str, tree: &DistributionTree) -> Result<(Placement, Assignment), SolutionError> {
    let mut placement = Placement::new();
    let mut assignment = Assignment::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let lookup = |id: &str| {
            tree.lookup(id).ok_or_else(|| SolutionError::UnknownNode { line, id: id.to_string() })
        };
        match tokens.as_slice() {
            [] => {}
            ["replica", id] => {
                let node = lookup(id)?;
                if !tree.is_internal(node) {
                    return Err(SolutionError::NotInternal { line, id: id.to_string() });
                }
                placement.insert(node);
            }
            ["assign", client, server, count] => {
                let c = lookup(client)?;
                let s = lookup(server)?;
                if !tree.is_client(c) {
                    return Err(SolutionError::NotClient { line, id: client.to_string() });
                }
                if !tree.is_internal(s) {
                    return Err(SolutionError::NotInternal { line, id: server.to_string() });
                }
                let count: u64 = count
                    .parse()
                    .ok()
                    .filter(|&v| v > 0)
                    .ok_or_else(|| SolutionError::Syntax { line, message: format!("bad count `{count}`") })?;
                assignment.add(c, s, count);
            }
            _ => {
                return Err(SolutionError::Syntax {
                    line,
                    message: "expected `replica <node>` or `assign <client> <server> <count>`".to_string(),
                })
            }
        }
    }
    Ok((placement, assignment))
}

pub fn write_solution(tree: &DistributionTree, placement: &Placement, assignment: &Assignment) -> String {
    let mut out = String::new();
    for r in placement.iter() {
        out.push_str(&format!("replica {}\n", tree.id(r)));
    }
    for (c, s, n) in assignment.iter() {
        out.push_str(&format!("assign {} {} {}\n", tree.id(c), tree.id(s), n));
    }
    out
}
