use std::collections::HashMap;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::corpus::{is_unit, normalize_word, tokenize, MaskItem, MaskedText};
use crate::io::data_lines;
use crate::role::{Role, SlotKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CandidateKind {
    Chem,
    Num,
    Lexicon,
}

impl CandidateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CandidateKind::Chem => "chem",
            CandidateKind::Num => "num",
            CandidateKind::Lexicon => "lexicon",
        }
    }
}

/// A span of the masked document that could answer a role question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub kind: CandidateKind,
    pub item_index: usize,
    /// Number of masked items covered (1 except for multi-word lexicon hits).
    pub item_len: usize,
    pub entity_index: Option<usize>,
    pub value: String,
    /// Unit token following a number, kept in the answer text ("85 %").
    pub unit: Option<String>,
}

impl Candidate {
    pub fn answer_text(&self) -> String {
        match &self.unit {
            Some(u) => format!("{} {u}", self.value),
            None => self.value.clone(),
        }
    }
}

/// Reaction-type vocabulary plus a verb → noun map ("oxidized" → "oxidation").
#[derive(Debug, Clone, Default)]
pub struct ReactionLexicon {
    entries: Vec<(Vec<String>, String)>,
    verbs: HashMap<String, String>,
}

impl ReactionLexicon {
    pub fn parse(lexicon: &str, verb_map: &str) -> ReactionLexicon {
        let mut entries: Vec<(Vec<String>, String)> = data_lines(lexicon)
            .map(|(_, l)| {
                let name = l.trim();
                (tokenize(name).into_iter().map(|t| t.normalized).collect::<Vec<String>>(), name.to_string())
            })
            .filter(|(k, _)| !k.is_empty())
            .collect();
        entries.sort_by(|a, b| b.0.len().cmp(&a.0.len()));
        let verbs = data_lines(verb_map)
            .filter_map(|(_, l)| {
                let (verb, noun) = l.split_once('\t')?;
                Some((normalize_word(verb.trim()), noun.trim().to_string()))
            })
            .collect();
        ReactionLexicon { entries, verbs }
    }

    pub fn builtin() -> &'static ReactionLexicon {
        static LEXICON: LazyLock<ReactionLexicon> = LazyLock::new(|| {
            ReactionLexicon::parse(
                include_str!("../../data/reaction_types.txt"),
                include_str!("../../data/reaction_verbs.txt"),
            )
        });
        &LEXICON
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Longest lexicon hit starting at `at`, as (items covered, canonical name).
    fn hit(&self, items: &[MaskItem], at: usize) -> Option<(usize, String)> {
        let word = |i: usize| match items.get(i) {
            Some(MaskItem::Word(w)) => Some(w.as_str()),
            _ => None,
        };
        for (key, name) in &self.entries {
            if (0..key.len()).all(|k| word(at + k) == Some(key[k].as_str())) {
                return Some((key.len(), name.clone()));
            }
        }
        let w = word(at)?;
        self.verbs.get(w).map(|noun| (1, noun.clone()))
    }
}

/// Candidates for a role in document order: chemical entities for the
/// chemical roles, numbers for the numeric ones, lexicon words for the
/// reaction type.
pub fn generate_candidates(role: Role, masked: &MaskedText) -> Vec<Candidate> {
    generate_candidates_with(role, masked, ReactionLexicon::builtin())
}

pub fn generate_candidates_with(role: Role, masked: &MaskedText, lexicon: &ReactionLexicon) -> Vec<Candidate> {
    let items = &masked.items;
    let mut out = Vec::new();
    match role.slot_kind() {
        SlotKind::Chem | SlotKind::Num => {
            for (i, item) in items.iter().enumerate() {
                let (kind, e) = match (item, role.slot_kind()) {
                    (MaskItem::Chem(e), SlotKind::Chem) => (CandidateKind::Chem, *e),
                    (MaskItem::Num(e), SlotKind::Num) => (CandidateKind::Num, *e),
                    _ => continue,
                };
                let unit = match kind {
                    CandidateKind::Num => masked
                        .surfaces
                        .get(i + 1)
                        .filter(|s| matches!(items[i + 1], MaskItem::Word(_)) && is_unit(s))
                        .cloned(),
                    _ => None,
                };
                out.push(Candidate {
                    kind,
                    item_index: i,
                    item_len: 1,
                    entity_index: Some(e),
                    value: masked.entities[e].value.clone(),
                    unit,
                });
            }
        }
        SlotKind::Lexicon => {
            let mut i = 0;
            while i < items.len() {
                match lexicon.hit(items, i) {
                    Some((len, value)) => {
                        out.push(Candidate {
                            kind: CandidateKind::Lexicon,
                            item_index: i,
                            item_len: len,
                            entity_index: None,
                            value,
                            unit: None,
                        });
                        i += len;
                    }
                    None => i += 1,
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{prepare_text, Gazetteer};

    fn masked(text: &str) -> MaskedText {
        prepare_text("d", text, &Gazetteer::builtin())
    }

    #[test]
    fn chem_candidates_in_order() {
        let m = masked("FeCl3 and benzamide gave toluene .");
        let c = generate_candidates(Role::Product, &m);
        let values: Vec<&str> = c.iter().map(|c| c.value.as_str()).collect();
        assert_eq!(values, ["FeCl3", "benzamide", "toluene"]);
    }

    #[test]
    fn no_numbers_no_temperature() {
        assert!(generate_candidates(Role::Temperature, &masked("benzamide was obtained")).is_empty());
    }

    #[test]
    fn numbers_keep_units() {
        let c = generate_candidates(Role::Yield, &masked("in 85 % yield after 2 h"));
        let answers: Vec<String> = c.iter().map(Candidate::answer_text).collect();
        assert_eq!(answers, ["85 %", "2 h"]);
    }

    #[test]
    fn verbs_map_to_reaction_types() {
        let c = generate_candidates(Role::ReactionType, &masked("the alcohol was oxidized with DDQ"));
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].value, "oxidation");
        let c = generate_candidates(Role::ReactionType, &masked("a Suzuki coupling then hydrolysis"));
        let values: Vec<&str> = c.iter().map(|c| c.value.as_str()).collect();
        assert_eq!(values, ["Suzuki coupling", "hydrolysis"]);
        assert_eq!(c[0].item_len, 2);
        assert!(ReactionLexicon::builtin().len() >= 40);
    }
}
