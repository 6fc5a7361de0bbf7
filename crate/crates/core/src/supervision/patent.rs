use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{QAExample, SupervisionError};
use crate::io::jsonl_lines;
use crate::role::Role;

/// A reaction record aligned to its source text, as extracted from patents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatentRecord {
    pub id: String,
    pub text: String,
    pub product: Vec<String>,
    #[serde(default)]
    pub reactants: Vec<String>,
    #[serde(default)]
    pub catalysts: Vec<String>,
    #[serde(default)]
    pub solvents: Vec<String>,
}

impl PatentRecord {
    fn dedup(&mut self) {
        for list in [&mut self.product, &mut self.reactants, &mut self.catalysts, &mut self.solvents] {
            let mut seen = Vec::with_capacity(list.len());
            list.retain(|s| {
                if seen.contains(s) {
                    false
                } else {
                    seen.push(s.clone());
                    true
                }
            });
        }
    }

    pub fn arguments(&self) -> impl Iterator<Item = &String> {
        self.product.iter().chain(&self.reactants).chain(&self.catalysts).chain(&self.solvents)
    }

    pub fn role_list(&self, role: Role) -> &[String] {
        match role {
            Role::Product => &self.product,
            Role::Reactant => &self.reactants,
            Role::Catalyst => &self.catalysts,
            Role::Solvent => &self.solvents,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub input_count: usize,
    pub kept: usize,
    pub dropped_short: usize,
    pub dropped_long: usize,
    pub dropped_missing_arg: usize,
}

pub fn parse_patent_records(body: &str) -> Result<Vec<PatentRecord>, SupervisionError> {
    let mut out = Vec::new();
    for (line, raw) in jsonl_lines(body) {
        let parse_err = |message: String| SupervisionError::Parse { line, message };
        let mut rec: PatentRecord = serde_json::from_str(raw).map_err(|e| parse_err(e.to_string()))?;
        if rec.product.is_empty() {
            return Err(parse_err("`product` must be a nonempty list".into()));
        }
        rec.dedup();
        out.push(rec);
    }
    Ok(out)
}

/// Loads patent JSONL: `{"id", "text", "product", "reactants", "catalysts", "solvents"}`.
pub fn load_patent_records(path: &Path) -> Result<Vec<PatentRecord>, SupervisionError> {
    parse_patent_records(&fs::read_to_string(path)?)
}

pub const MIN_WORDS: usize = 8;
pub const MAX_WORDS: usize = 256;

/// Keeps records with 8..=256 whitespace-separated words whose every
/// argument occurs (case-insensitively) in the text. Drops are classified
/// short first, then long, then missing argument.
pub fn filter_patent_records(records: &[PatentRecord]) -> (Vec<PatentRecord>, DatasetStats) {
    let mut stats = DatasetStats {
        input_count: records.len(),
        ..DatasetStats::default()
    };
    let mut kept = Vec::new();
    for rec in records {
        let words = rec.text.split_whitespace().count();
        let lower = rec.text.to_lowercase();
        if words < MIN_WORDS {
            stats.dropped_short += 1;
        } else if words > MAX_WORDS {
            stats.dropped_long += 1;
        } else if !rec.arguments().all(|a| lower.contains(&a.to_lowercase())) {
            stats.dropped_missing_arg += 1;
        } else {
            stats.kept += 1;
            kept.push(rec.clone());
        }
    }
    (kept, stats)
}

/// One product question per record, then for each product one conditioned
/// question per knowledge role (reactant, catalyst, solvent). Empty lists
/// produce "None" examples.
pub fn patent_to_qa(kept: &[PatentRecord]) -> Vec<QAExample> {
    let mut out = Vec::new();
    for rec in kept {
        out.push(QAExample::new(Role::Product, &rec.id, &rec.text, None, rec.product.clone()));
        for product in &rec.product {
            for role in [Role::Reactant, Role::Catalyst, Role::Solvent] {
                out.push(QAExample::new(role, &rec.id, &rec.text, Some(product), rec.role_list(role).to_vec()));
            }
        }
    }
    out
}
