use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::io::{jsonl_lines, write_jsonl};
use crate::role::Role;

/// Role → arguments for one reaction. Always holds exactly one product;
/// roles without arguments are absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredReaction {
    pub source_doc_id: String,
    pub pairs: BTreeMap<Role, Vec<String>>,
}

impl StructuredReaction {
    pub fn new(doc_id: &str, product: &str) -> StructuredReaction {
        let mut pairs = BTreeMap::new();
        pairs.insert(Role::Product, vec![product.to_string()]);
        StructuredReaction { source_doc_id: doc_id.to_string(), pairs }
    }

    pub fn product(&self) -> &str {
        &self.pairs[&Role::Product][0]
    }

    pub fn get(&self, role: Role) -> Option<&[String]> {
        self.pairs.get(&role).map(Vec::as_slice)
    }

    /// Sets a non-product role; an empty list removes it.
    pub fn set(&mut self, role: Role, values: Vec<String>) {
        assert!(role != Role::Product, "the product is fixed at construction");
        if values.is_empty() {
            self.pairs.remove(&role);
        } else {
            self.pairs.insert(role, values);
        }
    }

    fn from_pairs(doc_id: &str, pairs: BTreeMap<Role, Vec<String>>) -> Result<StructuredReaction, String> {
        match pairs.get(&Role::Product) {
            Some(p) if p.len() == 1 => {}
            _ => return Err("a reaction needs exactly one product".into()),
        }
        if let Some((role, _)) = pairs.iter().find(|(_, v)| v.is_empty()) {
            return Err(format!("role `{role}` has an empty argument list"));
        }
        Ok(StructuredReaction { source_doc_id: doc_id.to_string(), pairs })
    }
}

/// One JSONL line of predictions or gold annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocReactions {
    pub doc_id: String,
    pub reactions: Vec<StructuredReaction>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Line {
    doc_id: String,
    reactions: Vec<BTreeMap<Role, Vec<String>>>,
}

impl From<&DocReactions> for Line {
    fn from(d: &DocReactions) -> Line {
        Line { doc_id: d.doc_id.clone(), reactions: d.reactions.iter().map(|r| r.pairs.clone()).collect() }
    }
}

pub fn parse_reactions(body: &str) -> Result<Vec<DocReactions>, PipelineError> {
    jsonl_lines(body)
        .map(|(line, text)| {
            let parsed: Line =
                serde_json::from_str(text).map_err(|e| PipelineError::Parse { line, message: e.to_string() })?;
            let reactions = parsed
                .reactions
                .into_iter()
                .map(|pairs| StructuredReaction::from_pairs(&parsed.doc_id, pairs))
                .collect::<Result<_, _>>()
                .map_err(|message| PipelineError::Parse { line, message })?;
            Ok(DocReactions { doc_id: parsed.doc_id, reactions })
        })
        .collect()
}

pub fn read_reactions(path: &Path) -> Result<Vec<DocReactions>, PipelineError> {
    parse_reactions(&std::fs::read_to_string(path)?)
}

pub fn write_reactions(path: &Path, docs: &[DocReactions]) -> Result<(), PipelineError> {
    let lines: Vec<Line> = docs.iter().map(Line::from).collect();
    write_jsonl(path, &lines)?;
    Ok(())
}

/// doc id → products, for product evaluation and gold conditioning.
pub fn products_by_doc(docs: &[DocReactions]) -> BTreeMap<String, Vec<String>> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for d in docs {
        out.entry(d.doc_id.clone())
            .or_default()
            .extend(d.reactions.iter().map(|r| r.product().to_string()));
    }
    out
}
