use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use thiserror::Error;

use super::generator::{generate_tree, GeneratorError, GeneratorParams};
use crate::heuristics::{best_of, Heuristic, HeuristicResult};
use crate::lp::{apply_relaxation, build_ilp, read_solution, write_lp_file, RelaxationMode, SolverStatus};
use crate::num::to_f64;
use crate::oracle::{exact, OracleError, DEFAULT_CAP};
use crate::tree::DistributionTree;
use crate::validate::{ConstraintProfile, Policy};

/// Where the per-instance reference cost comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reference {
    /// Exact Multiple optimum.
    Oracle,
    /// `<id>.sol` solver outputs for the refined Multiple program.
    Directory(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub lambdas: Vec<f64>,
    pub trees_per_lambda: usize,
    /// Shape of the trees; `lambda` and `seed` are set per instance.
    pub generator: GeneratorParams,
    pub heuristics: Vec<Heuristic>,
    pub reference: Reference,
    pub workers: usize,
    /// Writes `<id>.tree` and `<id>.lp` (refined Multiple program) here.
    pub export_dir: Option<PathBuf>,
    pub oracle_cap: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            lambdas: (1..=9).map(|k| k as f64 / 10.0).collect(),
            trees_per_lambda: 30,
            generator: GeneratorParams::default(),
            heuristics: Heuristic::ALL.to_vec(),
            reference: Reference::Oracle,
            workers: 1,
            export_dir: None,
            oracle_cap: DEFAULT_CAP,
        }
    }
}

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("instance {id}: {source}")]
    Generator { id: String, source: GeneratorError },
    #[error("instance {id}: {source}")]
    Oracle { id: String, source: OracleError },
    #[error("instance {id}: missing reference solution {path}")]
    MissingReference { id: String, path: PathBuf },
    #[error("instance {id}: {message}")]
    Reference { id: String, message: String },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicOutcome {
    pub heuristic: Heuristic,
    pub success: bool,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceOutcome {
    pub id: String,
    pub lambda_index: usize,
    pub seed: u64,
    /// `None` when the reference found no solution.
    pub reference: Option<f64>,
    pub results: Vec<HeuristicOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub lambda: f64,
    pub heuristic: Heuristic,
    pub instances: usize,
    /// Instances the reference solved (`|T_λ|`).
    pub solvable: usize,
    pub successes: usize,
    pub success_pct: f64,
    pub rcost: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CampaignReport {
    pub cells: Vec<Cell>,
    pub instances: Vec<InstanceOutcome>,
}

impl CampaignReport {
    pub fn cell(&self, lambda_index: usize, heuristic: Heuristic) -> Option<&Cell> {
        let per = self.cells.len() / self.lambda_count().max(1);
        self.cells.iter().skip(lambda_index * per).take(per).find(|c| c.heuristic == heuristic)
    }

    fn lambda_count(&self) -> usize {
        let mut seen: Vec<u64> = self.cells.iter().map(|c| c.lambda.to_bits()).collect();
        seen.dedup();
        seen.len()
    }
}

pub fn instance_id(lambda_index: usize, tree_index: usize) -> String {
    format!("l{lambda_index}_t{tree_index:03}")
}

/// Per-instance seed, a splitmix64 step over the campaign seed and the
/// instance coordinates.
pub fn instance_seed(seed: u64, lambda_index: usize, tree_index: usize) -> u64 {
    let mut z = seed
        .wrapping_add((lambda_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((tree_index as u64 + 1).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport, CampaignError> {
    let tasks: Vec<(usize, usize)> = (0..config.lambdas.len())
        .flat_map(|l| (0..config.trees_per_lambda).map(move |t| (l, t)))
        .collect();
    let workers = config.workers.clamp(1, tasks.len().max(1));
    if workers == 1 {
        let instances = tasks.iter().map(|&(l, t)| run_instance(config, l, t)).collect::<Result<Vec<_>, _>>()?;
        return Ok(summarize(config, instances));
    }
    let mut slots: Vec<Option<Result<InstanceOutcome, CampaignError>>> = (0..tasks.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let tasks = &tasks;
                scope.spawn(move || {
                    tasks
                        .iter()
                        .enumerate()
                        .skip(w)
                        .step_by(workers)
                        .map(|(k, &(l, t))| (k, run_instance(config, l, t)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (k, outcome) in h.join().expect("campaign worker panicked") {
                slots[k] = Some(outcome);
            }
        }
    });
    let instances = slots.into_iter().map(|s| s.expect("every task ran")).collect::<Result<Vec<_>, _>>()?;
    Ok(summarize(config, instances))
}

fn run_instance(config: &CampaignConfig, l: usize, t: usize) -> Result<InstanceOutcome, CampaignError> {
    let id = instance_id(l, t);
    let seed = instance_seed(config.generator.seed, l, t);
    let params = GeneratorParams { lambda: config.lambdas[l], seed, ..config.generator.clone() };
    let tree = generate_tree(&params).map_err(|source| CampaignError::Generator { id: id.clone(), source })?;
    if let Some(dir) = &config.export_dir {
        export(dir, &id, &tree)?;
    }
    let reference = reference_cost(config, &id, &tree)?;
    let results = evaluate(&tree, &config.heuristics)
        .into_iter()
        .map(|r| HeuristicOutcome { heuristic: r.heuristic, success: r.success, cost: to_f64(&r.cost) })
        .collect();
    Ok(InstanceOutcome { id, lambda_index: l, seed, reference, results })
}

/// Runs the requested heuristics, computing MixedBest from the base runs.
pub fn evaluate(tree: &DistributionTree, heuristics: &[Heuristic]) -> Vec<HeuristicResult> {
    let needs_all = heuristics.contains(&Heuristic::MixedBest);
    let base: Vec<HeuristicResult> = Heuristic::BASE
        .iter()
        .filter(|h| needs_all || heuristics.contains(h))
        .map(|h| h.run(tree))
        .collect();
    heuristics
        .iter()
        .map(|&h| match h {
            Heuristic::MixedBest => best_of(&base),
            _ => base.iter().find(|r| r.heuristic == h).expect("computed above").clone(),
        })
        .collect()
}

fn refined_model(tree: &DistributionTree) -> crate::lp::IlpModel {
    apply_relaxation(&build_ilp(tree, Policy::Multiple, ConstraintProfile::NONE), RelaxationMode::RefinedXInteger)
}

fn export(dir: &std::path::Path, id: &str, tree: &DistributionTree) -> Result<(), CampaignError> {
    let io = |path: PathBuf, e: std::io::Error| CampaignError::Io { path, message: e.to_string() };
    fs::create_dir_all(dir).map_err(|e| io(dir.to_path_buf(), e))?;
    let tree_path = dir.join(format!("{id}.tree"));
    fs::write(&tree_path, tree.to_text()).map_err(|e| io(tree_path, e))?;
    let lp_path = dir.join(format!("{id}.lp"));
    fs::write(&lp_path, write_lp_file(&refined_model(tree))).map_err(|e| io(lp_path, e))
}

fn reference_cost(config: &CampaignConfig, id: &str, tree: &DistributionTree) -> Result<Option<f64>, CampaignError> {
    match &config.reference {
        Reference::Oracle => exact(tree, Policy::Multiple, config.oracle_cap)
            .map(|o| o.cost().map(|c| to_f64(&c)))
            .map_err(|source| CampaignError::Oracle { id: id.to_string(), source }),
        Reference::Directory(dir) => {
            let path = dir.join(format!("{id}.sol"));
            let text = fs::read_to_string(&path)
                .map_err(|_| CampaignError::MissingReference { id: id.to_string(), path: path.clone() })?;
            let sol = read_solution(&text, &refined_model(tree), tree)
                .map_err(|e| CampaignError::Reference { id: id.to_string(), message: e.to_string() })?;
            Ok((sol.status != SolverStatus::Infeasible).then_some(sol.objective))
        }
    }
}

fn summarize(config: &CampaignConfig, instances: Vec<InstanceOutcome>) -> CampaignReport {
    let mut cells = Vec::new();
    for (l, &lambda) in config.lambdas.iter().enumerate() {
        let group: Vec<&InstanceOutcome> = instances.iter().filter(|i| i.lambda_index == l).collect();
        let solvable: Vec<&&InstanceOutcome> = group.iter().filter(|i| i.reference.is_some()).collect();
        for (k, &heuristic) in config.heuristics.iter().enumerate() {
            let successes = group.iter().filter(|i| i.results[k].success).count();
            let rcost_sum: f64 = solvable
                .iter()
                .map(|i| {
                    let r = &i.results[k];
                    let reference = i.reference.expect("filtered");
                    if !r.success {
                        0.0
                    } else if r.cost == 0.0 {
                        1.0
                    } else {
                        reference / r.cost
                    }
                })
                .sum();
            cells.push(Cell {
                lambda,
                heuristic,
                instances: group.len(),
                solvable: solvable.len(),
                successes,
                success_pct: if group.is_empty() { 0.0 } else { 100.0 * successes as f64 / group.len() as f64 },
                rcost: if solvable.is_empty() { 0.0 } else { rcost_sum / solvable.len() as f64 },
            });
        }
    }
    CampaignReport { cells, instances }
}

pub const CSV_HEADER: &str = "lambda,heuristic,instances,successes,success_pct,rcost";

pub fn emit_csv(report: &CampaignReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in &report.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.4},{:.4}",
            c.lambda, c.heuristic, c.instances, c.successes, c.success_pct, c.rcost
        );
    }
    out
}
