use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::candidate::{generate_candidates, Candidate};
use super::features::featurize;
use super::{compact_argument, ExtractorError};
use crate::corpus::MaskedText;
use crate::io::write_atomic;
use crate::role::Role;
use crate::supervision::QAExample;

pub const MODEL_FORMAT: &str = "rxnmine-extractor";
pub const MODEL_VERSION: u32 = 1;

// Weights live on a 1e-12 grid so the 12-digit file form is exact.
const GRID: f64 = 1e12;

fn quantize(x: f64) -> f64 {
    let q = (x * GRID).round() / GRID;
    if q == 0.0 {
        0.0
    } else {
        q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hyper {
    pub epochs: u32,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper { epochs: 5, learning_rate: 0.1, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RoleWeights {
    pub bias: f64,
    pub weights: BTreeMap<String, f64>,
}

impl RoleWeights {
    pub fn score(&self, features: &[String]) -> f64 {
        let z = self.bias + features.iter().filter_map(|f| self.weights.get(f)).sum::<f64>();
        sigmoid(z)
    }
}

/// Per-role logistic scorers sharing one decision threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractorModel {
    threshold: f64,
    pub hyper: Hyper,
    roles: BTreeMap<Role, RoleWeights>,
}

impl ExtractorModel {
    pub fn new(hyper: Hyper) -> ExtractorModel {
        ExtractorModel { threshold: 0.5, hyper, roles: BTreeMap::new() }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn set_threshold(&mut self, tau: f64) -> Result<(), ExtractorError> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(ExtractorError::InvalidThreshold(tau));
        }
        self.threshold = quantize(tau);
        Ok(())
    }

    pub fn with_threshold(mut self, tau: f64) -> Result<ExtractorModel, ExtractorError> {
        self.set_threshold(tau)?;
        Ok(self)
    }

    pub fn is_trained(&self, role: Role) -> bool {
        self.roles.contains_key(&role)
    }

    pub fn trained_roles(&self) -> impl Iterator<Item = Role> + '_ {
        self.roles.keys().copied()
    }

    pub fn role_weights(&self, role: Role) -> Result<&RoleWeights, ExtractorError> {
        self.roles.get(&role).ok_or(ExtractorError::UntrainedRole(role))
    }

    /// Installs weights for a role, snapping them to the storage grid.
    pub fn insert_role(&mut self, role: Role, weights: RoleWeights) {
        let snapped = RoleWeights {
            bias: quantize(weights.bias),
            weights: weights
                .weights
                .into_iter()
                .map(|(k, v)| (k, quantize(v)))
                .filter(|(_, v)| *v != 0.0)
                .collect(),
        };
        self.roles.insert(role, snapped);
    }

    /// Canonical file form: fixed key order, sorted feature names, reals
    /// with twelve decimals.
    pub fn to_canonical_json(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{{");
        let _ = writeln!(s, "  \"format\": \"{MODEL_FORMAT}\",");
        let _ = writeln!(s, "  \"version\": {MODEL_VERSION},");
        let _ = writeln!(s, "  \"threshold\": {:.12},", self.threshold);
        let _ = writeln!(
            s,
            "  \"hyper\": {{\"epochs\": {}, \"learning_rate\": {:?}, \"seed\": {}}},",
            self.hyper.epochs, self.hyper.learning_rate, self.hyper.seed
        );
        let _ = write!(s, "  \"roles\": {{");
        for (i, (role, rw)) in self.roles.iter().enumerate() {
            let _ = write!(s, "{}\n    \"{}\": {{\n", if i == 0 { "" } else { "," }, role.as_str());
            let _ = writeln!(s, "      \"bias\": {:.12},", rw.bias);
            let _ = write!(s, "      \"weights\": {{");
            for (j, (name, w)) in rw.weights.iter().enumerate() {
                let key = serde_json::to_string(name).expect("string serializes");
                let _ = write!(s, "{}\n        {key}: {w:.12}", if j == 0 { "" } else { "," });
            }
            if rw.weights.is_empty() {
                let _ = writeln!(s, "}}");
            } else {
                let _ = writeln!(s, "\n      }}");
            }
            let _ = write!(s, "    }}");
        }
        if self.roles.is_empty() {
            let _ = writeln!(s, "}}");
        } else {
            let _ = writeln!(s, "\n  }}");
        }
        let _ = writeln!(s, "}}");
        s
    }

    pub fn from_json(body: &str) -> Result<ExtractorModel, ExtractorError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct RoleFile {
            bias: f64,
            weights: BTreeMap<String, f64>,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct ModelFile {
            format: String,
            version: u32,
            threshold: f64,
            hyper: Hyper,
            roles: BTreeMap<String, RoleFile>,
        }
        let file: ModelFile = serde_json::from_str(body).map_err(|e| ExtractorError::Parse(e.to_string()))?;
        if file.format != MODEL_FORMAT {
            return Err(ExtractorError::Parse(format!("unknown format `{}`", file.format)));
        }
        if file.version != MODEL_VERSION {
            return Err(ExtractorError::Parse(format!("unsupported version {}", file.version)));
        }
        let mut model = ExtractorModel::new(file.hyper)
            .with_threshold(file.threshold)
            .map_err(|e| ExtractorError::Parse(e.to_string()))?;
        for (name, rf) in file.roles {
            let role: Role = name.parse().map_err(|e: crate::role::UnknownRole| ExtractorError::Parse(e.to_string()))?;
            model.insert_role(role, RoleWeights { bias: rf.bias, weights: rf.weights });
        }
        Ok(model)
    }
}

pub fn save_model(model: &ExtractorModel, path: &Path) -> Result<(), ExtractorError> {
    write_atomic(path, model.to_canonical_json().as_bytes())?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<ExtractorModel, ExtractorError> {
    ExtractorModel::from_json(&std::fs::read_to_string(path)?)
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn dot(w: &[f64], bias: f64, x: &[(usize, f64)]) -> f64 {
    bias + x.iter().map(|&(i, v)| w[i] * v).sum::<f64>()
}

/// Log loss of one sparse instance, computed without overflow.
pub fn logistic_loss(w: &[f64], bias: f64, x: &[(usize, f64)], y: f64) -> f64 {
    let z = dot(w, bias, x);
    z.max(0.0) + (-z.abs()).exp().ln_1p() - y * z
}

/// Gradient of [`logistic_loss`] as (sparse weight gradient, bias gradient).
pub fn logistic_gradient(w: &[f64], bias: f64, x: &[(usize, f64)], y: f64) -> (Vec<(usize, f64)>, f64) {
    let g = sigmoid(dot(w, bias, x)) - y;
    (x.iter().map(|&(i, v)| (i, g * v)).collect(), g)
}

/// One candidate of one QA example, featurized and labeled.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub role: Role,
    pub features: Vec<String>,
    pub label: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub instances: usize,
    pub positives: usize,
    pub initial_loss: f64,
    pub final_loss: f64,
}

/// Expands QA examples into labeled candidate instances. A candidate is
/// positive when its value (or value plus unit) matches an answer after
/// normalization, ignoring whitespace.
pub fn build_instances(examples: &[QAExample], masked_corpus: &[MaskedText]) -> Result<Vec<Instance>, ExtractorError> {
    let index: HashMap<&str, &MaskedText> = masked_corpus.iter().map(|m| (m.doc_id.as_str(), m)).collect();
    let mut out = Vec::new();
    for ex in examples {
        let masked = index
            .get(ex.doc_id.as_str())
            .ok_or_else(|| ExtractorError::MissingDocument(ex.doc_id.clone()))?;
        let answers: HashSet<String> = ex.answers.iter().map(|a| compact_argument(a)).collect();
        for c in generate_candidates(ex.role, masked) {
            let label = answers.contains(&compact_argument(&c.value)) || answers.contains(&compact_argument(&c.answer_text()));
            out.push(Instance {
                role: ex.role,
                features: featurize(&c, masked, ex.condition_product.as_deref()),
                label,
            });
        }
    }
    Ok(out)
}

pub fn train(examples: &[QAExample], masked_corpus: &[MaskedText], hyper: Hyper) -> Result<ExtractorModel, ExtractorError> {
    train_with_report(examples, masked_corpus, hyper).map(|(m, _)| m)
}

pub fn train_with_report(
    examples: &[QAExample],
    masked_corpus: &[MaskedText],
    hyper: Hyper,
) -> Result<(ExtractorModel, TrainReport), ExtractorError> {
    if examples.is_empty() {
        return Err(ExtractorError::EmptyTrainingSet);
    }
    train_instances(&build_instances(examples, masked_corpus)?, hyper)
}

/// Seeded SGD on each role's instances; every epoch visits the instances in
/// a fresh shuffled order. Roles without instances stay untrained.
pub fn train_instances(instances: &[Instance], hyper: Hyper) -> Result<(ExtractorModel, TrainReport), ExtractorError> {
    if instances.is_empty() {
        return Err(ExtractorError::EmptyTrainingSet);
    }
    let mut by_role: BTreeMap<Role, Vec<&Instance>> = BTreeMap::new();
    for inst in instances {
        by_role.entry(inst.role).or_default().push(inst);
    }

    let mut model = ExtractorModel::new(hyper);
    let mut initial = 0.0;
    for (role, insts) in &by_role {
        let mut ids: HashMap<&str, usize> = HashMap::new();
        let mut names: Vec<&str> = Vec::new();
        let data: Vec<(Vec<(usize, f64)>, f64)> = insts
            .iter()
            .map(|inst| {
                let x = inst
                    .features
                    .iter()
                    .map(|f| {
                        let id = *ids.entry(f.as_str()).or_insert_with(|| {
                            names.push(f.as_str());
                            names.len() - 1
                        });
                        (id, 1.0)
                    })
                    .collect();
                (x, if inst.label { 1.0 } else { 0.0 })
            })
            .collect();

        let mut w = vec![0.0; names.len()];
        let mut b = 0.0;
        initial += data.iter().map(|(x, y)| logistic_loss(&w, b, x, *y)).sum::<f64>();

        let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed ^ ((*role as u64 + 1) << 40));
        let mut order: Vec<usize> = (0..data.len()).collect();
        for _ in 0..hyper.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                let (x, y) = &data[i];
                let (gw, gb) = logistic_gradient(&w, b, x, *y);
                b -= hyper.learning_rate * gb;
                for (j, g) in gw {
                    w[j] -= hyper.learning_rate * g;
                }
            }
        }
        let weights = names.iter().zip(&w).map(|(n, v)| (n.to_string(), *v)).collect();
        model.insert_role(*role, RoleWeights { bias: b, weights });
    }

    let final_loss: f64 = instances
        .iter()
        .map(|inst| {
            let p = model.roles[&inst.role].score(&inst.features).clamp(1e-300, 1.0 - 1e-16);
            if inst.label {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum();
    let n = instances.len() as f64;
    let report = TrainReport {
        instances: instances.len(),
        positives: instances.iter().filter(|i| i.label).count(),
        initial_loss: initial / n,
        final_loss: final_loss / n,
    };
    Ok((model, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCandidate {
    pub candidate: Candidate,
    pub score: f64,
}

/// Every candidate for the role with its score, in document order.
pub fn score_candidates(
    model: &ExtractorModel,
    role: Role,
    masked: &MaskedText,
    condition_product: Option<&str>,
) -> Result<Vec<ScoredCandidate>, ExtractorError> {
    let rw = model.role_weights(role)?;
    Ok(generate_candidates(role, masked)
        .into_iter()
        .map(|c| {
            let score = rw.score(&featurize(&c, masked, condition_product));
            ScoredCandidate { candidate: c, score }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerSpan {
    pub value: String,
    pub entity_index: Option<usize>,
    pub score: f64,
}

/// Candidates scoring at least the threshold; empty means "None".
pub fn predict(
    model: &ExtractorModel,
    role: Role,
    masked: &MaskedText,
    condition_product: Option<&str>,
) -> Result<Vec<AnswerSpan>, ExtractorError> {
    Ok(score_candidates(model, role, masked, condition_product)?
        .into_iter()
        .filter(|s| s.score >= model.threshold)
        .map(|s| AnswerSpan { value: s.candidate.answer_text(), entity_index: s.candidate.entity_index, score: s.score })
        .collect())
}
