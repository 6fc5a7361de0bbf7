//! Collapsing tagged entities into `[Chem]` / `[Num]` placeholders.

use serde::{Deserialize, Serialize};

use super::tagger::{EntityKind, EntityTag};
use super::tokenize::Token;
use super::CorpusError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MaskItem {
    Word(String),
    Chem(usize),
    Num(usize),
}

impl MaskItem {
    pub fn entity_index(&self) -> Option<usize> {
        match self {
            MaskItem::Word(_) => None,
            MaskItem::Chem(i) | MaskItem::Num(i) => Some(*i),
        }
    }

    /// Rendering used in features and snippets.
    pub fn render(&self) -> &str {
        match self {
            MaskItem::Word(w) => w,
            MaskItem::Chem(_) => "[chem]",
            MaskItem::Num(_) => "[num]",
        }
    }
}

/// A document's item sequence with every entity collapsed to one placeholder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskedText {
    pub doc_id: String,
    pub items: Vec<MaskItem>,
    pub entities: Vec<EntityTag>,
    /// Byte span of each item in the source text.
    pub spans: Vec<(usize, usize)>,
    /// Source surface of each item (the entity value for placeholders).
    pub surfaces: Vec<String>,
}

impl MaskedText {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Item index of each entity's placeholder.
    pub fn entity_positions(&self) -> Vec<usize> {
        let mut pos = vec![usize::MAX; self.entities.len()];
        for (i, item) in self.items.iter().enumerate() {
            if let Some(e) = item.entity_index() {
                pos[e] = i;
            }
        }
        pos
    }

    /// Replaces placeholders with entity values and words with their surfaces.
    pub fn unmask(&self) -> Vec<String> {
        self.items
            .iter()
            .zip(&self.surfaces)
            .map(|(item, surface)| match item.entity_index() {
                Some(i) => self.entities[i].value.clone(),
                None => surface.clone(),
            })
            .collect()
    }
}

pub fn mask(doc_id: &str, tokens: &[Token], tags: &[EntityTag]) -> Result<MaskedText, CorpusError> {
    let mut sorted: Vec<&EntityTag> = tags.iter().collect();
    sorted.sort_by_key(|t| (t.token_start, t.token_end));
    let mut cursor = 0;
    for t in &sorted {
        if t.token_end <= t.token_start || t.token_end > tokens.len() || t.token_start < cursor {
            return Err(CorpusError::OverlappingTags {
                start: t.token_start,
                end: t.token_end,
            });
        }
        cursor = t.token_end;
    }

    let mut items = Vec::with_capacity(tokens.len());
    let mut spans = Vec::with_capacity(tokens.len());
    let mut surfaces = Vec::with_capacity(tokens.len());
    let mut entities = Vec::with_capacity(sorted.len());
    let mut next_tag = sorted.iter().peekable();
    let mut i = 0;
    while i < tokens.len() {
        if let Some(tag) = next_tag.next_if(|t| t.token_start == i) {
            let idx = entities.len();
            items.push(match tag.kind {
                EntityKind::Chem => MaskItem::Chem(idx),
                EntityKind::Num => MaskItem::Num(idx),
            });
            spans.push((tokens[tag.token_start].char_start, tokens[tag.token_end - 1].char_end));
            surfaces.push(tag.value.clone());
            entities.push((*tag).clone());
            i = tag.token_end;
        } else {
            items.push(MaskItem::Word(tokens[i].normalized.clone()));
            spans.push((tokens[i].char_start, tokens[i].char_end));
            surfaces.push(tokens[i].surface.clone());
            i += 1;
        }
    }
    Ok(MaskedText {
        doc_id: doc_id.to_string(),
        items,
        entities,
        spans,
        surfaces,
    })
}
