use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::MaskedText;
use crate::extractor::{score_candidates, ExtractorError, ExtractorModel};
use crate::pattern::{match_pattern, parse_pattern, MinedCandidate, Origin, Pattern, PatternError};
use crate::role::Role;

const MAX_SNIPPETS: usize = 5;
const SNIPPET_CONTEXT: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pending,
    Accepted,
    Rejected,
}

/// Unmasked text around one match; `highlight` is the byte range of the
/// matched window inside `text`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snippet {
    pub doc_id: String,
    pub text: String,
    pub highlight: (usize, usize),
}

/// One line of an iteration's review queue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewCandidate {
    pub id: String,
    pub role: Role,
    pub pattern: String,
    pub frequency: usize,
    pub precision_proxy: f64,
    /// Corpus-wide matches of the pattern, the proxy's denominator.
    pub matches: usize,
    pub sample_doc_ids: Vec<String>,
    pub snippets: Vec<Snippet>,
    pub status: Status,
}

impl ReviewCandidate {
    pub fn to_pattern(&self, origin: Origin) -> Result<Pattern, PatternError> {
        let mut p = parse_pattern(self.role.as_str(), &self.pattern)?;
        p.origin = origin;
        Ok(p)
    }
}

/// Model scores for every candidate entity of every document, computed once
/// per iteration. Non-product roles are conditioned on the document's first
/// predicted product and have no scores where there is none.
#[derive(Debug, Clone)]
pub struct ScoreTable {
    threshold: f64,
    docs: Vec<BTreeMap<Role, HashMap<usize, f64>>>,
    pub products: Vec<Option<String>>,
}

impl ScoreTable {
    pub fn build(model: &ExtractorModel, masked: &[MaskedText], roles: &BTreeSet<Role>) -> Result<ScoreTable, ExtractorError> {
        let mut docs = Vec::with_capacity(masked.len());
        let mut products = Vec::with_capacity(masked.len());
        for m in masked {
            let mut per_role = BTreeMap::new();
            let mut product = None;
            if roles.contains(&Role::Product) && model.is_trained(Role::Product) {
                let scored = score_candidates(model, Role::Product, m, None)?;
                product = scored.iter().find(|s| s.score >= model.threshold()).map(|s| s.candidate.answer_text());
                per_role.insert(Role::Product, entity_scores(scored));
            }
            if let Some(cond) = &product {
                for &role in roles {
                    if role != Role::Product && model.is_trained(role) {
                        per_role.insert(role, entity_scores(score_candidates(model, role, m, Some(cond))?));
                    }
                }
            }
            docs.push(per_role);
            products.push(product);
        }
        Ok(ScoreTable { threshold: model.threshold(), docs, products })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn score(&self, doc: usize, role: Role, entity: usize) -> Option<f64> {
        self.docs.get(doc)?.get(&role)?.get(&entity).copied()
    }

    /// (role, entity) pairs scored at or above the threshold, sorted.
    pub fn labels(&self, doc: usize) -> Vec<(Role, usize)> {
        let mut out: Vec<(Role, usize)> = self.docs[doc]
            .iter()
            .flat_map(|(role, scores)| {
                scores.iter().filter(|(_, s)| **s >= self.threshold).map(move |(e, _)| (*role, *e))
            })
            .collect();
        out.sort();
        out
    }
}

fn entity_scores(scored: Vec<crate::extractor::ScoredCandidate>) -> HashMap<usize, f64> {
    scored.into_iter().filter_map(|s| s.candidate.entity_index.map(|e| (e, s.score))).collect()
}

/// Share of the pattern's corpus matches whose argument the model scores at
/// or above the threshold, with the match count. Zero matches give 0.
pub fn precision_proxy(pattern: &Pattern, table: &ScoreTable, masked: &[MaskedText]) -> (f64, usize) {
    let (mut hits, mut total) = (0usize, 0usize);
    for (d, m) in masked.iter().enumerate() {
        for found in match_pattern(pattern, m) {
            total += 1;
            if table.score(d, pattern.role, found.argument_entity).is_some_and(|s| s >= table.threshold) {
                hits += 1;
            }
        }
    }
    let proxy = if total == 0 { 0.0 } else { hits as f64 / total as f64 };
    (proxy, total)
}

fn snippets(pattern: &Pattern, masked: &[MaskedText]) -> Vec<Snippet> {
    let width = pattern.items.len();
    let mut out = Vec::new();
    for m in masked {
        for found in match_pattern(pattern, m) {
            if out.len() == MAX_SNIPPETS {
                return out;
            }
            let from = found.item_start.saturating_sub(SNIPPET_CONTEXT);
            let to = (found.item_start + width + SNIPPET_CONTEXT).min(m.surfaces.len());
            let mut text = String::new();
            let mut highlight = (0, 0);
            for i in from..to {
                if i > from {
                    text.push(' ');
                }
                if i == found.item_start {
                    highlight.0 = text.len();
                }
                text.push_str(&m.surfaces[i]);
                if i + 1 == found.item_start + width {
                    highlight.1 = text.len();
                }
            }
            out.push(Snippet { doc_id: m.doc_id.clone(), text, highlight });
        }
    }
    out
}

fn ranking(a: &ReviewCandidate, b: &ReviewCandidate, len: &HashMap<String, usize>) -> Ordering {
    b.frequency
        .cmp(&a.frequency)
        .then(b.precision_proxy.total_cmp(&a.precision_proxy))
        .then(len[a.id.as_str()].cmp(&len[b.id.as_str()]))
        .then(a.role.cmp(&b.role))
        .then(a.pattern.cmp(&b.pattern))
}

/// Review queue order: frequency, then precision proxy, then the canonical
/// tiebreak; at most `top_k` candidates per role.
pub fn rank_with_scores(cands: &[MinedCandidate], table: &ScoreTable, masked: &[MaskedText], top_k: usize) -> Vec<ReviewCandidate> {
    let mut rows: Vec<ReviewCandidate> = cands
        .iter()
        .map(|c| {
            let pattern = c.to_pattern(Origin::Seed);
            let (precision_proxy, matches) = precision_proxy(&pattern, table, masked);
            ReviewCandidate {
                id: c.id(),
                role: c.role,
                pattern: c.render(),
                frequency: c.frequency,
                precision_proxy,
                matches,
                sample_doc_ids: c.sample_doc_ids.clone(),
                snippets: snippets(&pattern, masked),
                status: Status::Pending,
            }
        })
        .collect();
    let len: HashMap<String, usize> = cands.iter().map(|c| (c.id(), c.items.len())).collect();
    rows.sort_by(|a, b| ranking(a, b, &len));
    let mut per_role: HashMap<Role, usize> = HashMap::new();
    rows.retain(|r| {
        let n = per_role.entry(r.role).or_default();
        *n += 1;
        *n <= top_k
    });
    rows
}

pub fn rank_candidates(
    cands: &[MinedCandidate],
    model: &ExtractorModel,
    masked: &[MaskedText],
    top_k: usize,
) -> Result<Vec<ReviewCandidate>, ExtractorError> {
    let roles: BTreeSet<Role> = cands.iter().map(|c| c.role).chain([Role::Product]).collect();
    let table = ScoreTable::build(model, masked, &roles)?;
    Ok(rank_with_scores(cands, &table, masked, top_k))
}
