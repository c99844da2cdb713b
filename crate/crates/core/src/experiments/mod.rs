//! Random tree generation and heuristic comparison campaigns.

pub mod campaign;
pub mod config;
pub mod generator;

pub use campaign::{emit_csv, evaluate, run_campaign, CampaignConfig, CampaignError, CampaignReport, Cell, Reference};
pub use config::{parse_config, ConfigError};
pub use generator::{generate_tree, CapacityMode, GeneratorError, GeneratorParams};
