//! The flat `key = value` configuration file.
//!
//! ```text
//! # paths; relative ones resolve against the file's directory
//! workspace = ws
//! corpus = corpus.jsonl
//! gazetteer = names.txt
//! seeds = seeds.tsv
//! patents = patents.jsonl
//! gold = gold.jsonl
//!
//! # bootstrap
//! iterations = 3
//! n_min = 2
//! n_max = 6
//! allow_any_range = false
//! min_freq = 5
//! top_k_per_role = 50
//! review_mode = interactive
//! auto_accept_precision = 0.8
//! negative_ratio = 0.0
//! linguistic_roles = product,yield,temperature,time
//!
//! # extractor
//! epochs = 5
//! learning_rate = 0.1
//! seed = 42
//! threshold = 0.5
//! ```
//!
//! Blank lines and `#` comments are ignored. Unknown keys are errors.
//! `--set key=value` on the command line overrides the file, and
//! dedicated flags override both.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rxnmine::bootstrap::{BootstrapConfig, ReviewMode};
use rxnmine::Role;

use crate::error::CliError;

pub const KEYS: [&str; 20] = [
    "workspace",
    "corpus",
    "gazetteer",
    "seeds",
    "patents",
    "gold",
    "iterations",
    "n_min",
    "n_max",
    "allow_any_range",
    "min_freq",
    "top_k_per_role",
    "review_mode",
    "auto_accept_precision",
    "negative_ratio",
    "linguistic_roles",
    "epochs",
    "learning_rate",
    "seed",
    "threshold",
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Paths {
    pub workspace: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    pub seeds: Option<PathBuf>,
    pub patents: Option<PathBuf>,
    pub gold: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AppConfig {
    pub paths: Paths,
    pub bootstrap: BootstrapConfig,
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::usage(format!("`{key}`: cannot parse `{value}`")))
}

impl AppConfig {
    /// Reads a config file over the compiled-in defaults.
    pub fn load(path: &Path) -> Result<AppConfig, CliError> {
        if !path.exists() {
            return Err(CliError::missing_file(path));
        }
        let body = fs::read_to_string(path)?;
        let mut config = AppConfig::default();
        config.apply_text(&body, path.parent().unwrap_or(Path::new("")))?;
        Ok(config)
    }

    pub fn apply_text(&mut self, body: &str, base: &Path) -> Result<(), CliError> {
        for (i, raw) in body.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("config line {}: expected `key = value`", i + 1)))?;
            self.set(key.trim(), value.trim(), base)
                .map_err(|e| CliError { detail: format!("config line {}: {}", i + 1, e.detail), ..e })?;
        }
        Ok(())
    }

    /// Sets one key. Relative paths are joined onto `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<(), CliError> {
        let path = || Some(base.join(value));
        let b = &mut self.bootstrap;
        match key {
            "workspace" => self.paths.workspace = path(),
            "corpus" => self.paths.corpus = path(),
            "gazetteer" => self.paths.gazetteer = path(),
            "seeds" => self.paths.seeds = path(),
            "patents" => self.paths.patents = path(),
            "gold" => self.paths.gold = path(),
            "iterations" => b.iterations = number(key, value)?,
            "n_min" => b.mine.n_min = number(key, value)?,
            "n_max" => b.mine.n_max = number(key, value)?,
            "allow_any_range" => b.mine.allow_any_range = number(key, value)?,
            "min_freq" => b.min_freq = number(key, value)?,
            "top_k_per_role" => b.top_k_per_role = number(key, value)?,
            "review_mode" => {
                b.review_mode = match value {
                    "interactive" => ReviewMode::Interactive,
                    "auto" => ReviewMode::Auto,
                    _ => return Err(CliError::usage(format!("review_mode is `interactive` or `auto`, got `{value}`"))),
                }
            }
            "auto_accept_precision" => b.auto_accept_precision = number(key, value)?,
            "negative_ratio" => b.negative_ratio = number(key, value)?,
            "linguistic_roles" => {
                b.linguistic_roles = value
                    .split(',')
                    .filter(|r| !r.trim().is_empty())
                    .map(|r| r.parse::<Role>().map_err(|e| CliError::usage(e.to_string())))
                    .collect::<Result<BTreeSet<_>, _>>()?
            }
            "epochs" => b.hyper.epochs = number(key, value)?,
            "learning_rate" => b.hyper.learning_rate = number(key, value)?,
            "seed" => b.hyper.seed = number(key, value)?,
            "threshold" => b.threshold = number(key, value)?,
            _ => return Err(CliError::usage(format!("unknown config key `{key}`; known keys: {}", KEYS.join(", ")))),
        }
        Ok(())
    }

    /// Applies a `key=value` override from the command line.
    pub fn set_override(&mut self, pair: &str) -> Result<(), CliError> {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("--set expects key=value, got `{pair}`")))?;
        self.set(key.trim(), value.trim(), Path::new(""))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.bootstrap.validate().map_err(CliError::from)
    }

    /// The effective configuration in file form; reading it back gives an
    /// equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let p = &self.paths;
        for (key, value) in [
            ("workspace", &p.workspace),
            ("corpus", &p.corpus),
            ("gazetteer", &p.gazetteer),
            ("seeds", &p.seeds),
            ("patents", &p.patents),
            ("gold", &p.gold),
        ] {
            if let Some(v) = value {
                let _ = writeln!(s, "{key} = {}", v.display());
            }
        }
        let b = &self.bootstrap;
        let mode = match b.review_mode {
            ReviewMode::Interactive => "interactive",
            ReviewMode::Auto => "auto",
        };
        let roles: Vec<&str> = b.linguistic_roles.iter().map(|r| r.as_str()).collect();
        let _ = writeln!(s, "iterations = {}", b.iterations);
        let _ = writeln!(s, "n_min = {}", b.mine.n_min);
        let _ = writeln!(s, "n_max = {}", b.mine.n_max);
        let _ = writeln!(s, "allow_any_range = {}", b.mine.allow_any_range);
        let _ = writeln!(s, "min_freq = {}", b.min_freq);
        let _ = writeln!(s, "top_k_per_role = {}", b.top_k_per_role);
        let _ = writeln!(s, "review_mode = {mode}");
        let _ = writeln!(s, "auto_accept_precision = {:?}", b.auto_accept_precision);
        let _ = writeln!(s, "negative_ratio = {:?}", b.negative_ratio);
        let _ = writeln!(s, "linguistic_roles = {}", roles.join(","));
        let _ = writeln!(s, "epochs = {}", b.hyper.epochs);
        let _ = writeln!(s, "learning_rate = {:?}", b.hyper.learning_rate);
        let _ = writeln!(s, "seed = {}", b.hyper.seed);
        let _ = writeln!(s, "threshold = {:?}", b.threshold);
        s
    }
}
