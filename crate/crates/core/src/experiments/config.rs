//! Campaign settings as `key = value` lines. `#` starts a comment; keys not
//! given keep their defaults.
//!
//! ```text
//! lambdas = 0.1, 0.2, 0.5
//! trees = 30
//! size = 15..400
//! capacity = 100          # or 20..60 for heterogeneous trees
//! heuristics = CTDA, MG, MB
//! reference = oracle      # or a directory of <id>.sol files
//! ```

use std::path::PathBuf;

use thiserror::Error;

use super::campaign::{CampaignConfig, Reference};
use super::generator::CapacityMode;
use crate::heuristics::Heuristic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

fn number<T: std::str::FromStr>(value: &str) -> Result<T, String> {
    value.trim().parse().map_err(|_| format!("bad number `{}`", value.trim()))
}

fn range(value: &str) -> Result<(u64, u64), String> {
    match value.split_once("..") {
        Some((a, b)) => Ok((number(a)?, number(b)?)),
        None => {
            let v = number(value)?;
            Ok((v, v))
        }
    }
}

fn list<T>(value: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(f).collect()
}

fn optional(value: &str) -> Result<Option<usize>, String> {
    if value == "none" {
        Ok(None)
    } else {
        number(value).map(Some)
    }
}

pub fn parse_config(text: &str) -> Result<CampaignConfig, ConfigError> {
    let mut config = CampaignConfig::default();
    for (n, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| ConfigError { line: n + 1, message };
        let (key, value) = content.split_once('=').ok_or_else(|| err("expected `key = value`".into()))?;
        let value = value.trim();
        let g = &mut config.generator;
        let applied: Result<(), String> = match key.trim() {
            "lambdas" => list(value, number::<f64>).map(|v| config.lambdas = v),
            "trees" => number(value).map(|v| config.trees_per_lambda = v),
            "size" => range(value).map(|(a, b)| (g.size_min, g.size_max) = (a as usize, b as usize)),
            "max_internal" => optional(value).map(|v| g.max_internal = v),
            "max_clients" => optional(value).map(|v| g.max_clients = v),
            "capacity" => range(value).map(|(a, b)| {
                g.capacity = if value.contains("..") {
                    CapacityMode::Heterogeneous { min: a, max: b }
                } else {
                    CapacityMode::Homogeneous(a)
                }
            }),
            "branching" => range(value).map(|(a, b)| (g.branching_min, g.branching_max) = (a as usize, b as usize)),
            "seed" => number(value).map(|v| g.seed = v),
            "heuristics" => list(value, |s| s.parse::<Heuristic>()).map(|v| config.heuristics = v),
            "reference" => {
                config.reference =
                    if value == "oracle" { Reference::Oracle } else { Reference::Directory(PathBuf::from(value)) };
                Ok(())
            }
            "workers" => number(value).map(|v| config.workers = v),
            "export_dir" => {
                config.export_dir = Some(PathBuf::from(value));
                Ok(())
            }
            "oracle_cap" => number(value).map(|v| config.oracle_cap = v),
            other => Err(format!("unknown key `{other}`")),
        };
        applied.map_err(err)?;
    }
    Ok(config)
}
