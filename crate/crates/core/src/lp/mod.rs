//! Integer linear programs for the three access policies, their
//! relaxations, CPLEX LP export and solver solution import.
//!
//! Variables:
//! * `x_<j>`: replica on internal node `j`;
//! * `y_<i>_<j>`: client `i` served by ancestor `j` (binary for single-server
//!   policies, a request count for Multiple);
//! * `z_<i>_<k>`: requests of `i` crossing the link from `k` to its parent.
//!
//! Clients with no requests need no server and get no variables.

mod read;
mod write;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::num::Rational;
use crate::solution::{Assignment, Placement};
use crate::tree::{DistributionTree, NodeIdx};
use crate::validate::{ConstraintProfile, Policy};

pub use read::{read_solution, ReadError, SolverSolution, SolverStatus};
pub use write::write_lp_file;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarRole {
    X(NodeIdx),
    Y { client: NodeIdx, server: NodeIdx },
    /// `link` is the child end of the link.
    Z { client: NodeIdx, link: NodeIdx },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub role: VarRole,
    pub kind: VarKind,
    /// Kind in the unrelaxed program.
    pub integral_kind: VarKind,
    pub lower: Rational,
    pub upper: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    /// `(variable index, coefficient)`, sorted by variable name.
    pub terms: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RelaxationMode {
    #[default]
    ExactInteger,
    FullyRational,
    /// Only the placement variables `x_j` stay integral.
    RefinedXInteger,
}

impl fmt::Display for RelaxationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelaxationMode::ExactInteger => "exact",
            RelaxationMode::FullyRational => "rational",
            RelaxationMode::RefinedXInteger => "refined",
        })
    }
}

impl FromStr for RelaxationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" | "integer" => Ok(RelaxationMode::ExactInteger),
            "rational" | "relaxed" => Ok(RelaxationMode::FullyRational),
            "refined" => Ok(RelaxationMode::RefinedXInteger),
            other => Err(format!("unknown relaxation `{other}` (expected exact, rational or refined)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpModel {
    pub policy: Policy,
    pub profile: ConstraintProfile,
    pub mode: RelaxationMode,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Minimized; `Σ sc_j x_j`.
    pub objective: Vec<(usize, Rational)>,
    index: HashMap<String, usize>,
}

impl IlpModel {
    pub fn variable(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn constraint(&self, name: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.name == name)
    }

    pub fn count(&self, prefix: char) -> usize {
        self.variables.iter().filter(|v| v.name.starts_with(prefix)).count()
    }

    pub fn objective_value(&self, values: &[Rational]) -> Rational {
        self.objective.iter().fold(Rational::zero(), |acc, &(k, c)| acc + c * values[k])
    }

    /// Variable values describing an integral solution.
    pub fn encode(&self, tree: &DistributionTree, placement: &Placement, assignment: &Assignment) -> Vec<Rational> {
        let multiple = self.policy == Policy::Multiple;
        self.variables
            .iter()
            .map(|v| {
                let value = match v.role {
                    VarRole::X(j) => u64::from(placement.contains(j)),
                    VarRole::Y { client, server } => {
                        let served = assignment.get(client, server);
                        if multiple { served } else { u64::from(served > 0) }
                    }
                    VarRole::Z { client, link } => {
                        // Requests processed at or below `link` never cross it.
                        let crossing: u64 = assignment
                            .servers_of(client)
                            .iter()
                            .filter(|&&(s, _)| tree.is_ancestor(s, link))
                            .map(|&(_, n)| n)
                            .sum();
                        if multiple { crossing } else { u64::from(crossing > 0) }
                    }
                };
                Rational::from_integer(value as i64)
            })
            .collect()
    }

    /// Names of the constraints and bounds that `values` violate.
    pub fn violations(&self, values: &[Rational]) -> Vec<String> {
        let mut out = Vec::new();
        for (v, value) in self.variables.iter().zip(values) {
            if *value < v.lower || *value > v.upper {
                out.push(format!("bound {}", v.name));
            }
        }
        for c in &self.constraints {
            let lhs = c.terms.iter().fold(Rational::zero(), |acc, &(k, a)| acc + a * values[k]);
            let ok = match c.sense {
                Sense::Le => lhs <= c.rhs,
                Sense::Eq => lhs == c.rhs,
            };
            if !ok {
                out.push(c.name.clone());
            }
        }
        out
    }
}

struct Builder {
    model: IlpModel,
}

impl Builder {
    fn var(&mut self, mut name: String, role: VarRole, kind: VarKind, upper: Rational) -> usize {
        let k = self.model.variables.len();
        // Ids may contain `_`, so `y_a_b_c` can be produced twice.
        if self.model.index.contains_key(&name) {
            name = format!("{name}~{k}");
        }
        self.model.index.insert(name.clone(), k);
        self.model.variables.push(Variable {
            name,
            role,
            kind,
            integral_kind: kind,
            lower: Rational::zero(),
            upper,
        });
        k
    }

    fn constraint(&mut self, name: String, mut terms: Vec<(usize, Rational)>, sense: Sense, rhs: Rational) {
        let vars = &self.model.variables;
        terms.sort_by(|a, b| vars[a.0].name.cmp(&vars[b.0].name));
        self.model.constraints.push(Constraint { name, terms, sense, rhs });
    }
}

fn int(v: u64) -> Rational {
    Rational::from_integer(v as i64)
}

/// Builds the integer program of `policy` with the constraints of `profile`.
pub fn build_ilp(tree: &DistributionTree, policy: Policy, profile: ConstraintProfile) -> IlpModel {
    let multiple = policy == Policy::Multiple;
    let mut b = Builder {
        model: IlpModel {
            policy,
            profile,
            mode: RelaxationMode::ExactInteger,
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
            index: HashMap::new(),
        },
    };
    let one = Rational::one();
    let id = |k: NodeIdx| tree.id(k).to_string();

    let mut x = HashMap::new();
    for &j in tree.internal_nodes() {
        let k = b.var(format!("x_{}", id(j)), VarRole::X(j), VarKind::Binary, one);
        x.insert(j, k);
        b.model.objective.push((k, tree.storage_cost(j)));
    }
    let demanding: Vec<NodeIdx> = tree.clients().iter().copied().filter(|&c| tree.requests(c) > 0).collect();
    let mut y = HashMap::new();
    let mut z = HashMap::new();
    for &i in &demanding {
        let r = tree.requests(i);
        let (kind, upper) = if multiple { (VarKind::Integer, int(r)) } else { (VarKind::Binary, one) };
        for j in tree.ancestors_iter(i) {
            let mut up = upper;
            if multiple && profile.qos {
                if let Some(q) = tree.qos(i) {
                    if tree.distance(i, j).expect("ancestor") > q {
                        up = Rational::zero();
                    }
                }
            }
            let k = b.var(format!("y_{}_{}", id(i), id(j)), VarRole::Y { client: i, server: j }, kind, up);
            y.insert((i, j), k);
        }
        let mut link = i;
        while tree.parent(link).is_some() {
            let k = b.var(format!("z_{}_{}", id(i), id(link)), VarRole::Z { client: i, link }, kind, upper);
            z.insert((i, link), k);
            link = tree.parent(link).expect("checked");
        }
    }

    // Every client (or every request) is assigned a server.
    for &i in &demanding {
        let rhs = if multiple { int(tree.requests(i)) } else { one };
        let terms = tree.ancestors_iter(i).map(|j| (y[&(i, j)], one)).collect();
        b.constraint(format!("asg_{}", id(i)), terms, Sense::Eq, rhs);
    }
    // Every request of a client uses the link to its parent.
    for &i in &demanding {
        let rhs = if multiple { int(tree.requests(i)) } else { one };
        b.constraint(format!("leaf_{}", id(i)), vec![(z[&(i, i)], one)], Sense::Eq, rhs);
    }
    // z_{i,succ(l)} = z_{i,l} - y_{i,parent}, written z_succ - z_l + y = 0.
    for &i in &demanding {
        let mut link = i;
        while let Some(up) = tree.parent(link) {
            if tree.parent(up).is_some() {
                let terms = vec![(z[&(i, up)], one), (z[&(i, link)], -one), (y[&(i, up)], one)];
                b.constraint(format!("flow_{}_{}", id(i), id(link)), terms, Sense::Eq, Rational::zero());
            }
            link = up;
        }
    }
    for &j in tree.internal_nodes() {
        let mut terms: Vec<(usize, Rational)> = demanding
            .iter()
            .filter(|&&i| tree.is_ancestor(j, i))
            .map(|&i| (y[&(i, j)], if multiple { one } else { int(tree.requests(i)) }))
            .collect();
        terms.push((x[&j], -int(tree.capacity(j))));
        b.constraint(format!("cap_{}", id(j)), terms, Sense::Le, Rational::zero());
    }
    if profile.bandwidth {
        for k in 0..tree.len() {
            let link = NodeIdx(k);
            let Some(bw) = tree.link(link).and_then(|l| l.bandwidth) else { continue };
            let terms: Vec<(usize, Rational)> = demanding
                .iter()
                .filter(|&&i| z.contains_key(&(i, link)))
                .map(|&i| (z[&(i, link)], if multiple { one } else { int(tree.requests(i)) }))
                .collect();
            if !terms.is_empty() {
                b.constraint(format!("bw_{}", id(link)), terms, Sense::Le, int(bw));
            }
        }
    }
    if profile.qos && !multiple {
        for &i in &demanding {
            let Some(q) = tree.qos(i) else { continue };
            for j in tree.ancestors_iter(i) {
                // dist * y <= q, scaled to integer coefficients.
                let dist = tree.distance(i, j).expect("ancestor");
                let scale = Rational::from_integer(dist.denom().lcm(q.denom()));
                b.constraint(
                    format!("qos_{}_{}", id(i), id(j)),
                    vec![(y[&(i, j)], dist * scale)],
                    Sense::Le,
                    q * scale,
                );
            }
        }
    }
    if policy == Policy::Closest {
        // If j serves i, no client of subtree(j) may use the link above j.
        for &i in &demanding {
            for j in tree.ancestors_iter(i) {
                if tree.parent(j).is_none() {
                    continue;
                }
                for &other in &demanding {
                    if tree.is_ancestor(j, other) {
                        b.constraint(
                            format!("cls_{}_{}_{}", id(i), id(j), id(other)),
                            vec![(y[&(i, j)], one), (z[&(other, j)], one)],
                            Sense::Le,
                            one,
                        );
                    }
                }
            }
        }
    }
    b.model
}

/// Relaxes integrality as requested; always starts from the integral kinds.
pub fn apply_relaxation(model: &IlpModel, mode: RelaxationMode) -> IlpModel {
    let mut out = model.clone();
    out.mode = mode;
    for v in &mut out.variables {
        let keep = match mode {
            RelaxationMode::ExactInteger => true,
            RelaxationMode::FullyRational => false,
            RelaxationMode::RefinedXInteger => matches!(v.role, VarRole::X(_)),
        };
        v.kind = if keep { v.integral_kind } else { VarKind::Continuous };
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("internal nodes have different capacities")]
    NotHomogeneous,
    #[error("capacity is zero")]
    ZeroCapacity,
}

/// `ceil(Σ r_i / W)` for a tree where every capacity equals `W`.
pub fn naive_lower_bound(tree: &DistributionTree) -> Result<u64, BoundError> {
    let w = tree.uniform_capacity().ok_or(BoundError::NotHomogeneous)?;
    if w == 0 {
        return Err(BoundError::ZeroCapacity);
    }
    Ok(tree.total_requests().div_ceil(w))
}
