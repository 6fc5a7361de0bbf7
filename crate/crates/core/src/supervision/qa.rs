use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{contains_ci, SupervisionError, WeakLabel};
use crate::corpus::{Document, Source};
use crate::extractor::question_for_role;
use crate::io::{jsonl_lines, write_jsonl};
use crate::role::Role;

/// One (question, context) pair; empty `answers` encodes "None".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QAExample {
    pub question: String,
    pub context: String,
    pub answers: Vec<String>,
    pub role: Role,
    pub doc_id: String,
    pub condition_product: Option<String>,
}

impl QAExample {
    pub fn new(role: Role, doc_id: &str, context: &str, condition: Option<&str>, answers: Vec<String>) -> QAExample {
        let question = question_for_role(role, condition).expect("condition supplied for non-product roles");
        QAExample {
            question,
            context: context.to_string(),
            answers: answers.into_iter().filter(|a| contains_ci(context, a)).collect(),
            role,
            doc_id: doc_id.to_string(),
            condition_product: if role == Role::Product { None } else { condition.map(str::to_string) },
        }
    }
}

/// Turns weak labels into QA examples.
///
/// Every (document, role) with labels yields one positive whose answers are
/// the labeled argument texts in reading order. For each role, label-free
/// documents are sampled as "None" examples, `negative_ratio` times the
/// number of positives, with a seeded RNG over documents sorted by id.
/// Non-product examples are conditioned on the document's first labeled
/// product and skipped when it has none.
pub fn labels_to_qa(labels: &[WeakLabel], corpus: &[Document], negative_ratio: f64, seed: u64) -> Vec<QAExample> {
    let mut by_doc: BTreeMap<&str, &Document> = corpus.iter().map(|d| (d.id.as_str(), d)).collect();
    by_doc.retain(|_, d| !d.text.is_empty());

    // (doc, role) -> entity index -> text, so answers come out in reading order
    let mut grouped: HashMap<(&str, Role), BTreeMap<usize, &str>> = HashMap::new();
    for l in labels {
        if by_doc.contains_key(l.doc_id.as_str()) {
            grouped
                .entry((l.doc_id.as_str(), l.role))
                .or_default()
                .insert(l.argument_entity, l.argument_text.as_str());
        }
    }
    let product_of = |doc: &str| -> Option<&str> {
        grouped.get(&(doc, Role::Product)).and_then(|m| m.values().next().copied())
    };
    let roles: BTreeSet<Role> = grouped.keys().map(|(_, r)| *r).collect();

    let mut out = Vec::new();
    for role in roles {
        let mut positives = Vec::new();
        let mut pool = Vec::new();
        for (&doc_id, doc) in &by_doc {
            let condition = if role == Role::Product { None } else { product_of(doc_id) };
            if role != Role::Product && condition.is_none() {
                continue;
            }
            match grouped.get(&(doc_id, role)) {
                Some(args) => {
                    let mut answers: Vec<String> = Vec::new();
                    for text in args.values() {
                        if !answers.iter().any(|a| a.eq_ignore_ascii_case(text)) {
                            answers.push(text.to_string());
                        }
                    }
                    positives.push(QAExample::new(role, doc_id, &doc.text, condition, answers));
                }
                None => pool.push((doc_id, *doc, condition)),
            }
        }
        let wanted = ((negative_ratio.max(0.0) * positives.len() as f64).round() as usize).min(pool.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((role as u64 + 1) << 32));
        let mut picked = rand::seq::index::sample(&mut rng, pool.len(), wanted).into_vec();
        picked.sort_unstable();
        out.extend(positives);
        for i in picked {
            let (doc_id, doc, condition) = pool[i];
            out.push(QAExample::new(role, doc_id, &doc.text, condition, Vec::new()));
        }
    }
    out
}

/// The distinct contexts of a dataset as fixture documents, sorted by id,
/// so examples can be masked without the corpus they came from.
pub fn contexts_as_corpus(examples: &[QAExample]) -> Result<Vec<Document>, SupervisionError> {
    let mut by_id: BTreeMap<&str, &str> = BTreeMap::new();
    for ex in examples {
        let seen = by_id.entry(&ex.doc_id).or_insert(&ex.context);
        if *seen != ex.context {
            return Err(SupervisionError::ConflictingContext(ex.doc_id.clone()));
        }
    }
    Ok(by_id
        .into_iter()
        .map(|(id, text)| Document { id: id.to_string(), text: text.to_string(), source: Source::Fixture })
        .collect())
}

pub fn parse_qa_dataset(body: &str) -> Result<Vec<QAExample>, SupervisionError> {
    jsonl_lines(body)
        .map(|(line, raw)| {
            serde_json::from_str(raw).map_err(|e| SupervisionError::Parse {
                line,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn load_qa_dataset(path: &Path) -> Result<Vec<QAExample>, SupervisionError> {
    parse_qa_dataset(&fs::read_to_string(path)?)
}

pub fn write_qa_dataset(path: &Path, examples: &[QAExample]) -> Result<(), SupervisionError> {
    Ok(write_jsonl(path, examples)?)
}
