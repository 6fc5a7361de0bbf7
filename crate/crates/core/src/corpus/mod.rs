//! Documents, tokens, entity tags and masked text.

mod document;
mod elements;
mod mask;
mod tagger;
mod tokenize;

pub use document::{load_corpus, parse_corpus, Document, Source};
pub use mask::{mask, MaskItem, MaskedText};
pub use tagger::{is_numeric, is_unit, tag_entities, EntityKind, EntityTag, Gazetteer};
pub use tokenize::{normalize_word, tokenize, Token};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("overlapping or out-of-range entity tags at tokens {start}..{end}")]
    OverlappingTags { start: usize, end: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Tokenizes, tags and masks one text.
pub fn prepare_text(doc_id: &str, text: &str, gazetteer: &Gazetteer) -> MaskedText {
    let tokens = tokenize(text);
    let tags = tag_entities(&tokens, gazetteer);
    mask(doc_id, &tokens, &tags).expect("tagger emits non-overlapping tags")
}

pub fn prepare(doc: &Document, gazetteer: &Gazetteer) -> MaskedText {
    prepare_text(&doc.id, &doc.text, gazetteer)
}

pub fn prepare_corpus(docs: &[Document], gazetteer: &Gazetteer) -> Vec<MaskedText> {
    docs.iter().map(|d| prepare(d, gazetteer)).collect()
}
