//! Solver output: optional `objective <v>` and `status <s>` lines followed by
//! `name value` pairs. Variables not listed are zero.

use thiserror::Error;

use super::{IlpModel, RelaxationMode, VarKind, VarRole};
use crate::num::to_f64;
use crate::solution::{Assignment, Placement};
use crate::tree::DistributionTree;
use crate::validate::{validate_all, ValidationReport};

const TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Optimal,
    Infeasible,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSolution {
    pub status: SolverStatus,
    /// Indexed like the model's variables.
    pub values: Vec<f64>,
    pub objective: f64,
    /// Rounded placement and assignment, for integral programs.
    pub integral: Option<(Placement, Assignment)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReadError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("empty solution file")]
    Empty,
    #[error("line {line}: unknown variable `{name}`")]
    UnknownVariable { line: usize, name: String },
    #[error("objective {stated} does not match the values ({computed})")]
    ObjectiveMismatch { stated: f64, computed: f64 },
    #[error("variable `{name}` = {value} is not integral")]
    NotIntegral { name: String, value: f64 },
    #[error("solution violates constraints:\n{0}")]
    Invalid(ValidationReport),
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Parses solver output against `model`. For integral programs the values
/// are rounded into a placement and assignment, which must pass the
/// validator for the model's policy and profile.
pub fn read_solution(text: &str, model: &IlpModel, tree: &DistributionTree) -> Result<SolverSolution, ReadError> {
    let mut values = vec![0.0; model.variables.len()];
    let mut stated = None;
    let mut status = SolverStatus::Unknown;
    let mut seen = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        seen = true;
        let (name, value) = content
            .split_once(char::is_whitespace)
            .map(|(a, b)| (a, b.trim()))
            .ok_or_else(|| ReadError::Syntax { line, message: "expected `name value`".into() })?;
        if name == "status" {
            status = match value.to_ascii_lowercase().as_str() {
                "optimal" => SolverStatus::Optimal,
                "infeasible" => SolverStatus::Infeasible,
                _ => SolverStatus::Unknown,
            };
            continue;
        }
        let number: f64 = value
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| ReadError::Syntax { line, message: format!("bad number `{value}`") })?;
        if name == "objective" {
            stated = Some(number);
            continue;
        }
        let k = model.variable(name).ok_or_else(|| ReadError::UnknownVariable { line, name: name.to_string() })?;
        values[k] = number;
    }
    if !seen {
        return Err(ReadError::Empty);
    }
    if status == SolverStatus::Infeasible {
        return Ok(SolverSolution { status, values, objective: f64::INFINITY, integral: None });
    }
    let computed: f64 = model.objective.iter().map(|(k, c)| to_f64(c) * values[*k]).sum();
    if let Some(s) = stated {
        if !close(s, computed) {
            return Err(ReadError::ObjectiveMismatch { stated: s, computed });
        }
    }
    let mut solution = SolverSolution { status, values, objective: stated.unwrap_or(computed), integral: None };
    if model.mode == RelaxationMode::ExactInteger {
        for (v, &value) in model.variables.iter().zip(&solution.values) {
            if v.kind != VarKind::Continuous && !close(value, value.round()) {
                return Err(ReadError::NotIntegral { name: v.name.clone(), value });
            }
        }
        let (placement, assignment) = to_integral(model, tree, &solution.values);
        let report = validate_all(tree, &placement, &assignment, model.policy, model.profile);
        if !report.is_ok() {
            return Err(ReadError::Invalid(report));
        }
        solution.integral = Some((placement, assignment));
    }
    Ok(solution)
}

fn to_integral(model: &IlpModel, tree: &DistributionTree, values: &[f64]) -> (Placement, Assignment) {
    let multiple = model.policy == crate::validate::Policy::Multiple;
    let mut placement = Placement::new();
    let mut assignment = Assignment::new();
    for (v, &value) in model.variables.iter().zip(values) {
        let rounded = value.round().max(0.0) as u64;
        match v.role {
            VarRole::X(j) if rounded >= 1 => {
                placement.insert(j);
            }
            VarRole::Y { client, server } if rounded >= 1 => {
                let amount = if multiple { rounded } else { tree.requests(client) };
                assignment.add(client, server, amount);
            }
            _ => {}
        }
    }
    (placement, assignment)
}
