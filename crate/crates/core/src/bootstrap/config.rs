use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::BootstrapError;
use crate::extractor::Hyper;
use crate::pattern::MineConfig;
use crate::role::Role;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReviewMode {
    Interactive,
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub iterations: u32,
    pub mine: MineConfig,
    pub min_freq: usize,
    pub top_k_per_role: usize,
    pub review_mode: ReviewMode,
    pub auto_accept_precision: f64,
    /// "None" examples sampled per positive QA example.
    pub negative_ratio: f64,
    pub hyper: Hyper,
    pub threshold: f64,
    pub linguistic_roles: BTreeSet<Role>,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            iterations: 3,
            mine: MineConfig::default(),
            min_freq: 5,
            top_k_per_role: 50,
            review_mode: ReviewMode::Interactive,
            auto_accept_precision: 0.8,
            negative_ratio: 0.0,
            hyper: Hyper::default(),
            threshold: 0.5,
            linguistic_roles: Role::LINGUISTIC.into_iter().collect(),
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<(), BootstrapError> {
        let bad = |m: &str| Err(BootstrapError::InvalidConfig(m.to_string()));
        if self.iterations < 1 {
            return bad("iterations must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.auto_accept_precision) {
            return bad("auto_accept_precision must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return bad("threshold must lie in [0, 1]");
        }
        if !(self.negative_ratio >= 0.0 && self.negative_ratio.is_finite()) {
            return bad("negative_ratio must be a non-negative number");
        }
        if self.top_k_per_role == 0 {
            return bad("top_k_per_role must be positive");
        }
        if self.linguistic_roles.is_empty() {
            return bad("linguistic_roles must not be empty");
        }
        if !(self.hyper.learning_rate > 0.0 && self.hyper.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        self.mine.validate().map_err(|e| BootstrapError::InvalidConfig(e.to_string()))
    }
}
