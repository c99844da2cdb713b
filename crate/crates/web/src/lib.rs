//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes and returns JSON strings; errors come back as
//! `{"error": "..."}` so the page never has to catch exceptions.

use replica_placement::experiments::{emit_csv, generate_tree, run_campaign, CampaignConfig, CapacityMode, GeneratorParams, Reference};
use replica_placement::heuristics::Heuristic;
use replica_placement::num::{format_rational, to_f64};
use replica_placement::optimal::solve_multiple_homogeneous;
use replica_placement::validate::{placement_cost, validate_all};
use replica_placement::{ConstraintProfile, DistributionTree, Policy};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Debug, Deserialize)]
#[serde(default)]
pub struct TreeRequest {
    pub lambda: f64,
    pub size_min: usize,
    pub size_max: usize,
    /// Homogeneous when `capacity_max` is absent or equal.
    pub capacity: u64,
    pub capacity_max: Option<u64>,
    pub branching_max: usize,
    pub seed: u64,
}

impl Default for TreeRequest {
    fn default() -> Self {
        TreeRequest { lambda: 0.5, size_min: 15, size_max: 40, capacity: 20, capacity_max: None, branching_max: 3, seed: 1 }
    }
}

impl TreeRequest {
    fn params(&self) -> GeneratorParams {
        let capacity = match self.capacity_max {
            Some(max) if max != self.capacity => CapacityMode::Heterogeneous { min: self.capacity, max },
            _ => CapacityMode::Homogeneous(self.capacity),
        };
        GeneratorParams {
            lambda: self.lambda,
            size_min: self.size_min,
            size_max: self.size_max,
            capacity,
            branching_max: self.branching_max.max(1),
            seed: self.seed,
            ..GeneratorParams::default()
        }
    }
}

#[derive(Debug, Serialize)]
pub struct NodeView {
    pub id: String,
    pub parent: Option<String>,
    pub client: bool,
    pub capacity: u64,
    pub requests: u64,
    pub cost: String,
}

#[derive(Debug, Serialize)]
pub struct TreeView {
    pub text: String,
    pub nodes: Vec<NodeView>,
    pub lambda: f64,
    pub total_requests: u64,
    pub homogeneous: bool,
}

#[derive(Debug, Serialize)]
pub struct Transfer {
    pub client: String,
    pub server: String,
    pub amount: u64,
}

#[derive(Debug, Serialize)]
pub struct SolveView {
    pub algo: String,
    pub policy: String,
    pub success: bool,
    pub residual: u64,
    pub cost: String,
    pub replicas: Vec<String>,
    pub assignment: Vec<Transfer>,
    /// Load of every node with a replica, in `replicas` order.
    pub loads: Vec<u64>,
    pub valid: bool,
}

#[derive(Debug, Deserialize)]
#[serde(default)]
pub struct SweepRequest {
    pub lambdas: Vec<f64>,
    pub trees: usize,
    pub capacity: u64,
    pub seed: u64,
}

impl Default for SweepRequest {
    fn default() -> Self {
        SweepRequest { lambdas: vec![0.2, 0.4, 0.6, 0.8], trees: 5, capacity: 100, seed: 1 }
    }
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub heuristic: String,
    pub success_pct: f64,
    pub rcost: f64,
}

#[derive(Debug, Serialize)]
pub struct SweepView {
    pub rows: Vec<SweepRow>,
    pub csv: String,
}

fn describe(tree: &DistributionTree) -> TreeView {
    let nodes = (0..tree.len())
        .map(|k| {
            let idx = replica_placement::NodeIdx(k);
            NodeView {
                id: tree.id(idx).to_string(),
                parent: tree.parent(idx).map(|p| tree.id(p).to_string()),
                client: tree.is_client(idx),
                capacity: tree.capacity(idx),
                requests: tree.requests(idx),
                cost: format_rational(&tree.storage_cost(idx)),
            }
        })
        .collect();
    TreeView {
        text: tree.to_text(),
        nodes,
        lambda: tree.load_lambda().map(|l| to_f64(&l)).unwrap_or(0.0),
        total_requests: tree.total_requests(),
        homogeneous: tree.is_homogeneous(),
    }
}

pub fn explore_tree(request: &TreeRequest) -> Result<TreeView, String> {
    generate_tree(&request.params()).map(|t| describe(&t)).map_err(|e| e.to_string())
}

pub fn solve(text: &str, algo: &str) -> Result<SolveView, String> {
    let tree: DistributionTree = text.parse().map_err(|e| format!("{e}"))?;
    let (policy, success, residual, placement, assignment) = if algo.eq_ignore_ascii_case("optimal-multiple") {
        match solve_multiple_homogeneous(&tree) {
            Ok(sol) => (Policy::Multiple, true, 0, sol.placement, sol.assignment),
            Err(replica_placement::optimal::OptimalError::Infeasible { residual }) => {
                (Policy::Multiple, false, residual, Default::default(), Default::default())
            }
            Err(e) => return Err(e.to_string()),
        }
    } else {
        let h: Heuristic = algo.parse()?;
        let r = h.run(&tree);
        (r.policy, r.success, r.residual, r.placement, r.assignment)
    };
    let loads = assignment.loads(tree.len());
    let valid = success && validate_all(&tree, &placement, &assignment, policy, ConstraintProfile::NONE).is_ok();
    Ok(SolveView {
        algo: algo.to_string(),
        policy: policy.to_string(),
        success,
        residual,
        cost: format_rational(&placement_cost(&tree, &placement)),
        replicas: placement.iter().map(|j| tree.id(j).to_string()).collect(),
        assignment: assignment
            .iter()
            .map(|(c, s, n)| Transfer { client: tree.id(c).to_string(), server: tree.id(s).to_string(), amount: n })
            .collect(),
        loads: placement.iter().map(|j| loads[j.0]).collect(),
        valid,
    })
}

/// Oracle-referenced campaign on trees small enough for exact optima.
pub fn sweep_campaign(request: &SweepRequest) -> Result<SweepView, String> {
    let config = CampaignConfig {
        lambdas: request.lambdas.clone(),
        trees_per_lambda: request.trees.min(50),
        generator: GeneratorParams {
            size_min: 6,
            size_max: 20,
            max_internal: Some(10),
            max_clients: Some(12),
            capacity: CapacityMode::Homogeneous(request.capacity),
            seed: request.seed,
            ..GeneratorParams::default()
        },
        reference: Reference::Oracle,
        workers: 1,
        ..CampaignConfig::default()
    };
    let report = run_campaign(&config).map_err(|e| e.to_string())?;
    let rows = report
        .cells
        .iter()
        .map(|c| SweepRow { lambda: c.lambda, heuristic: c.heuristic.to_string(), success_pct: c.success_pct, rcost: c.rcost })
        .collect();
    Ok(SweepView { rows, csv: emit_csv(&report) })
}

fn respond<T: Serialize>(result: Result<T, String>) -> String {
    match result {
        Ok(v) => serde_json::to_string(&v).expect("views serialize"),
        Err(e) => serde_json::json!({ "error": e }).to_string(),
    }
}

fn request<T: for<'de> Deserialize<'de>>(json: &str) -> Result<T, String> {
    serde_json::from_str(json).map_err(|e| format!("bad request: {e}"))
}

/// Generates a random tree; see [`TreeRequest`] for the fields.
#[wasm_bindgen]
pub fn explore(request_json: &str) -> String {
    respond(request(request_json).and_then(|r: TreeRequest| explore_tree(&r)))
}

/// Places replicas on a tree given in the text format.
#[wasm_bindgen]
pub fn solve_tree(tree_text: &str, algo: &str) -> String {
    respond(solve(tree_text, algo))
}

/// Success rate and relative cost of every heuristic over a load grid.
#[wasm_bindgen]
pub fn sweep(request_json: &str) -> String {
    respond(request(request_json).and_then(|r: SweepRequest| sweep_campaign(&r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use replica_placement::fixtures;

    #[test]
    fn explore_round_trips_the_tree_text() {
        let out: serde_json::Value = serde_json::from_str(&explore(r#"{"seed": 4}"#)).unwrap();
        let text = out["text"].as_str().unwrap();
        let tree: DistributionTree = text.parse().unwrap();
        assert_eq!(out["nodes"].as_array().unwrap().len(), tree.len());
        assert!((0.475..=0.525).contains(&out["lambda"].as_f64().unwrap()));
    }

    #[test]
    fn solve_fig1c() {
        let text = fixtures::fig1c().to_text();
        let out: serde_json::Value = serde_json::from_str(&solve_tree(&text, "optimal-multiple")).unwrap();
        assert_eq!(out["replicas"].as_array().unwrap().len(), 2);
        assert_eq!(out["valid"], true);
        let out: serde_json::Value = serde_json::from_str(&solve_tree(&text, "ctda")).unwrap();
        assert_eq!((out["success"].as_bool(), out["residual"].as_u64()), (Some(false), Some(2)));
    }

    #[test]
    fn errors_are_json() {
        let out: serde_json::Value = serde_json::from_str(&solve_tree("garbage", "mg")).unwrap();
        assert!(out["error"].is_string());
        let out: serde_json::Value = serde_json::from_str(&explore("{")).unwrap();
        assert!(out["error"].as_str().unwrap().starts_with("bad request"));
        let out: serde_json::Value = serde_json::from_str(&solve_tree(&fixtures::fig1a().to_text(), "zz")).unwrap();
        assert!(out["error"].is_string());
    }

    #[test]
    fn sweep_rows() {
        let out: serde_json::Value = serde_json::from_str(&sweep(r#"{"lambdas": [0.3, 0.6], "trees": 3}"#)).unwrap();
        assert_eq!(out["rows"].as_array().unwrap().len(), 2 * 9);
        assert_eq!(out["csv"].as_str().unwrap().lines().count(), 1 + 2 * 9);
    }
}
