use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::MaskedText;
use crate::pattern::{match_all, PatternSet};
use crate::role::Role;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Pattern { pattern_id: String },
    Model { score: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakLabel {
    pub doc_id: String,
    pub role: Role,
    pub argument_entity: usize,
    pub argument_text: String,
    pub provenance: Provenance,
}

/// One label per distinct (document, role, entity) hit by the set; the first
/// matching pattern in set order is recorded as provenance.
pub fn weak_label(masked_corpus: &[MaskedText], set: &PatternSet) -> Vec<WeakLabel> {
    let roles: HashMap<&str, Role> = set.patterns().iter().map(|p| (p.id.as_str(), p.role)).collect();
    let mut out = Vec::new();
    for masked in masked_corpus {
        let mut seen = HashSet::new();
        for m in match_all(set, masked) {
            let role = roles[m.pattern_id.as_str()];
            if seen.insert((role, m.argument_entity)) {
                out.push(WeakLabel {
                    doc_id: masked.doc_id.clone(),
                    role,
                    argument_entity: m.argument_entity,
                    argument_text: masked.entities[m.argument_entity].value.clone(),
                    provenance: Provenance::Pattern { pattern_id: m.pattern_id },
                });
            }
        }
    }
    out
}
