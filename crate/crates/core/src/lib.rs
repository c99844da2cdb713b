//! Replica placement on tree networks.
//!
//! Clients sit at the leaves of a fixed distribution tree and issue requests
//! that must be processed by replicas placed on internal nodes, under one of
//! three access policies:
//!
//! * **Closest**: every request of a client goes to the first replica on its
//!   path to the root;
//! * **Upwards**: every request of a client goes to one replica anywhere on
//!   that path;
//! * **Multiple**: a client's requests may be split among several replicas.
//!
//! The crate provides the tree model and file format, a validator for
//! placements and assignments, an optimal algorithm for the homogeneous
//! Multiple case, polynomial heuristics, exact exponential oracles for small
//! trees, integer program export, and an experiment harness.

pub mod experiments;
pub mod fixtures;
pub mod heuristics;
pub mod lp;
pub mod num;
pub mod optimal;
pub mod oracle;
pub mod solution;
pub mod tree;
pub mod validate;

pub use num::Rational;
pub use solution::{Assignment, Placement};
pub use tree::{DistributionTree, NodeIdx};
pub use validate::{ConstraintProfile, Policy};
