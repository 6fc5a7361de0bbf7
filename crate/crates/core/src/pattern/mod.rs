//! Pattern DSL, matching and frequent n-gram mining.
//!
//! A pattern is a short sequence of literal words and `[Chem]` / `[Num]`
//! placeholders. Exactly one placeholder carries the argument and is written
//! with a trailing `!`:
//!
//! ```text
//! product   conversion of [Chem] to [Chem!]
//! yield     in [Num!] % yield
//! ```

mod file;
mod matcher;
mod miner;

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{normalize_word, tokenize};
use crate::role::{Role, SlotKind};

pub use file::{parse_pattern_file, PatternSet};
pub use matcher::{match_all, match_pattern, Match};
pub use miner::{dedupe_and_filter, mine_candidates, LabeledDoc, MineConfig, MinedCandidate};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PatternItem {
    Literal(String),
    Chem { argument: bool },
    Num { argument: bool },
}

impl PatternItem {
    pub fn is_argument(&self) -> bool {
        matches!(self, PatternItem::Chem { argument: true } | PatternItem::Num { argument: true })
    }
}

impl fmt::Display for PatternItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternItem::Literal(w) => f.write_str(w),
            PatternItem::Chem { argument } => write!(f, "[Chem{}]", if *argument { "!" } else { "" }),
            PatternItem::Num { argument } => write!(f, "[Num{}]", if *argument { "!" } else { "" }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Seed,
    Enriched { iteration: u32 },
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Seed => f.write_str("seed"),
            Origin::Enriched { iteration } => write!(f, "enriched:{iteration}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub id: String,
    pub role: Role,
    pub items: Vec<PatternItem>,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("pattern has no argument slot (mark one with `!`, e.g. [Chem!])")]
    NoArgumentSlot,
    #[error("pattern has more than one argument slot")]
    MultipleArgumentSlots,
    #[error(transparent)]
    UnknownRole(#[from] crate::role::UnknownRole),
    #[error("argument slot kind does not fit role `{0}`")]
    KindMismatch(Role),
    #[error("pattern is empty")]
    Empty,
    #[error("n-gram range {n_min}..={n_max} is outside 2..=6")]
    InvalidRange { n_min: usize, n_max: usize },
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<PatternError>,
    },
    #[error("line {line}: expected `role<TAB>pattern`")]
    Malformed { line: usize },
}

/// Renders items in the pattern-file notation.
pub fn render_items(items: &[PatternItem]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

/// Stable identifier for a (role, items) pair.
pub fn pattern_key_id(role: Role, items: &[PatternItem]) -> String {
    let digest = Sha256::digest(format!("{role}\t{}", render_items(items)).as_bytes());
    hex::encode(&digest[..8])
}

impl Pattern {
    pub fn new(role: Role, items: Vec<PatternItem>, origin: Origin) -> Result<Pattern, PatternError> {
        if items.is_empty() {
            return Err(PatternError::Empty);
        }
        let mut args = items.iter().filter(|i| i.is_argument());
        let arg = args.next().ok_or(PatternError::NoArgumentSlot)?;
        if args.next().is_some() {
            return Err(PatternError::MultipleArgumentSlots);
        }
        let fits = matches!(
            (arg, role.slot_kind()),
            (PatternItem::Chem { .. }, SlotKind::Chem) | (PatternItem::Num { .. }, SlotKind::Num)
        );
        if !fits {
            return Err(PatternError::KindMismatch(role));
        }
        Ok(Pattern {
            id: pattern_key_id(role, &items),
            role,
            items,
            origin,
        })
    }

    /// Offset of the argument slot inside the pattern.
    pub fn argument_offset(&self) -> usize {
        self.items.iter().position(PatternItem::is_argument).expect("validated on construction")
    }

    pub fn key(&self) -> (Role, &[PatternItem]) {
        (self.role, &self.items)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_items(&self.items))
    }
}

fn parse_items(source: &str) -> Vec<PatternItem> {
    let mut items = Vec::new();
    for chunk in source.split_whitespace() {
        match chunk {
            "[Chem]" => items.push(PatternItem::Chem { argument: false }),
            "[Chem!]" => items.push(PatternItem::Chem { argument: true }),
            "[Num]" => items.push(PatternItem::Num { argument: false }),
            "[Num!]" => items.push(PatternItem::Num { argument: true }),
            _ => items.extend(
                tokenize(chunk)
                    .into_iter()
                    .map(|t| PatternItem::Literal(normalize_word(&t.surface))),
            ),
        }
    }
    items
}

/// Parses one pattern in the file notation. Literal words are tokenized and
/// normalized the same way as corpus text, so `°C,` becomes two literals.
pub fn parse_pattern(role: &str, source: &str) -> Result<Pattern, PatternError> {
    let role: Role = role.parse()?;
    Pattern::new(role, parse_items(source), Origin::Seed)
}

/// Parses the built-in seed patterns.
pub fn seed_patterns() -> PatternSet {
    let patterns = parse_pattern_file(include_str!("../../data/seed_patterns.tsv"))
        .expect("built-in seed file is valid");
    PatternSet::from_patterns(patterns)
}

/// A sample of enriched-style patterns shipped as examples.
pub fn example_enriched_patterns() -> Vec<Pattern> {
    parse_pattern_file(include_str!("../../data/enriched_examples.tsv"))
        .expect("built-in example file is valid")
}
