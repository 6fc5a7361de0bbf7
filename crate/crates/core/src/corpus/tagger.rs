//! Heuristic chemical / number tagger.
//!
//! Precedence: gazetteer longest match, then the number rules, then formula,
//! suffix morphology and compound labels. Adjacent heuristic chemical tokens
//! merge into one entity so multi-word names mask to one placeholder.

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::elements::is_element;
use super::tokenize::{tokenize, Token};
use super::CorpusError;
use crate::io::data_lines;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EntityKind {
    Chem,
    Num,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityTag {
    pub kind: EntityKind,
    pub token_start: usize,
    pub token_end: usize,
    /// Covered surfaces joined by a single space (nothing where the source
    /// tokens touch).
    pub value: String,
}

static NUMERIC: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^[+\-\x{2212}]?\d+(?:\.\d+)?(?:[-\x{2013}]\d+(?:\.\d+)?)?$").unwrap()
});
static LABEL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\d{1,3}[a-z]?$").unwrap());
static FORMULA_GROUP: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([A-Z][a-z]?)(\d*)").unwrap());

/// Units that force a preceding number to be `Num`.
const UNITS: &[&str] = &[
    "%", "°C", "°F", "K", "OC", "oC", "h", "hr", "hrs", "min", "s", "sec", "seconds", "hours",
    "days", "d", "mL", "ml", "L", "mg", "g", "kg", "mol", "mmol", "equiv", "eq", "M", "mM", "atm",
    "bar",
];

const CHEM_SUFFIXES: &[&str] = &[
    "ane", "ene", "yne", "ol", "al", "one", "ide", "ate", "ite", "ium", "yl", "oxy", "amine",
    "amide", "ose",
];

/// Words next to which a bare label like `13` or `5e` reads as a compound.
const LABEL_CUES: &[&str] = &[
    "compound", "product", "of", "afford", "afforded", "obtain", "yield", "give", "gave", "to",
    "with", "treatment",
];

/// Generic class nouns that extend a preceding chemical name
/// ("dihydroxybenzyl ester 15").
const CLASS_NOUNS: &[&str] = &[
    "ester", "acid", "salt", "ether", "ketone", "aldehyde", "alcohol", "anhydride", "complex",
    "derivative", "analogue", "analog", "adduct",
];

/// Common English words that happen to end in a chemical suffix.
const SUFFIX_STOPWORDS: &[&str] = &[
    "about", "above", "accurate", "activate", "actual", "additional", "adequate", "aggregate",
    "alone", "anyone", "appropriate", "approximate", "aside", "beside", "bone", "calculate",
    "candidate", "chemical", "classical", "close", "combine", "compose", "composite", "control",
    "create", "critical", "crucial", "date", "decide", "demonstrate", "despite", "done", "dose",
    "dual", "elevate", "elite", "equal", "estimate", "evaluate", "everyone", "experimental",
    "expose", "facilitate", "favorite", "final", "formal", "gene", "general", "gone", "guide",
    "ideal", "identical", "illustrate", "immediate", "indicate", "initial", "inside",
    "intermediate", "interval", "investigate", "invite", "isolate", "lane", "late", "local",
    "loose", "medium", "metal", "moderate", "mundane", "natural", "none", "normal", "one",
    "opposite", "optimal", "original", "outside", "overall", "phone", "plane", "plate", "pool",
    "potential", "propose", "protocol", "provide", "purpose", "quite", "rate", "real", "removal",
    "scene", "school", "separate", "several", "side", "signal", "site", "slide", "someone",
    "state", "stone", "suite", "suppose", "template", "theoretical", "those", "tone", "tool",
    "total", "translate", "typical", "ultimate", "usual", "via", "whose", "white", "wide",
    "write", "zone", "approval", "trial", "material", "materials", "terminal", "equilibrium",
    "premium", "generate", "concentrate", "complicate", "anticipate", "accelerate", "moderate",
    "individual", "interval", "minimal", "maximal", "thermal", "partial", "serial", "special",
    "spectral", "central", "neutral", "internal", "external", "global", "vital", "annual",
    "manual", "visual", "actual", "virtual", "several", "radical", "technical", "practical",
];

/// A list of known multi-word chemical names, matched case-insensitively.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: HashSet<Vec<String>>,
    max_len: usize,
}

impl Gazetteer {
    pub fn new() -> Gazetteer {
        Gazetteer::default()
    }

    pub fn insert(&mut self, name: &str) {
        let key: Vec<String> = tokenize(name).into_iter().map(|t| t.surface.to_lowercase()).collect();
        if key.is_empty() {
            return;
        }
        self.max_len = self.max_len.max(key.len());
        self.entries.insert(key);
    }

    pub fn from_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Gazetteer {
        let mut g = Gazetteer::new();
        for n in names {
            g.insert(n);
        }
        g
    }

    /// Parses the gazetteer file format: one name per line, `#` comments.
    pub fn parse(body: &str) -> Gazetteer {
        Gazetteer::from_names(data_lines(body).map(|(_, l)| l.trim()))
    }

    pub fn load(path: &Path) -> Result<Gazetteer, CorpusError> {
        let body = fs::read_to_string(path)?;
        Ok(Gazetteer::parse(&body))
    }

    /// The gazetteer shipped with the crate (common solvents and reagents).
    pub fn builtin() -> Gazetteer {
        Gazetteer::parse(include_str!("../../data/gazetteer.txt"))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn longest_match(&self, tokens: &[Token], at: usize) -> Option<usize> {
        let max = self.max_len.min(tokens.len() - at);
        (1..=max).rev().find(|&len| {
            let window = &tokens[at..at + len];
            joinable(window)
                && self
                    .entries
                    .contains(&window.iter().map(|t| t.surface.to_lowercase()).collect::<Vec<_>>())
        })
    }
}

pub fn is_numeric(surface: &str) -> bool {
    NUMERIC.is_match(surface)
}

pub fn is_unit(surface: &str) -> bool {
    UNITS.contains(&surface) || UNITS.contains(&surface.to_lowercase().as_str())
}

fn is_formula(surface: &str) -> bool {
    if surface.chars().count() < 2 || !surface.starts_with(|c: char| c.is_ascii_uppercase()) {
        return false;
    }
    let mut covered = 0;
    let mut groups = 0;
    let mut has_digit = false;
    for cap in FORMULA_GROUP.captures_iter(surface) {
        let whole = cap.get(0).unwrap();
        if whole.start() != covered || !is_element(&cap[1]) {
            return false;
        }
        has_digit |= !cap[2].is_empty();
        covered = whole.end();
        groups += 1;
    }
    covered == surface.len() && (has_digit || groups >= 2)
}

fn has_chem_suffix(surface: &str) -> bool {
    let lower = surface.to_lowercase();
    if lower.chars().count() < 5
        || !lower.chars().any(|c| c.is_alphabetic())
        || !lower.chars().all(|c| c.is_alphanumeric() || matches!(c, '-' | ',' | '\'' | '+'))
        || SUFFIX_STOPWORDS.contains(&lower.as_str())
    {
        return false;
    }
    let tail = lower.rsplit('-').next().unwrap_or(&lower);
    CHEM_SUFFIXES.iter().any(|s| tail.ends_with(s) && tail.len() > s.len() + 1)
}

/// Tokens may be fused into one entity only when they touch or are separated
/// by a single whitespace byte.
fn joinable(window: &[Token]) -> bool {
    window.windows(2).all(|w| w[1].char_start - w[0].char_end <= 1)
}

fn join_value(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 && t.char_start > tokens[i - 1].char_end {
            out.push(' ');
        }
        out.push_str(&t.surface);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    None,
    Gazetteer(usize),
    Chem,
    Num,
}

pub fn tag_entities(tokens: &[Token], gazetteer: &Gazetteer) -> Vec<EntityTag> {
    let n = tokens.len();
    let mut class = vec![Class::None; n];

    let mut i = 0;
    while i < n {
        match gazetteer.longest_match(tokens, i) {
            Some(len) => {
                class[i] = Class::Gazetteer(len);
                for c in &mut class[i + 1..i + len] {
                    *c = Class::Gazetteer(0);
                }
                i += len;
            }
            None => i += 1,
        }
    }

    let followed_by_unit = |i: usize| tokens.get(i + 1).is_some_and(|t| is_unit(&t.surface));
    for i in 0..n {
        if class[i] != Class::None {
            continue;
        }
        let surface = tokens[i].surface.as_str();
        if is_unit(surface) {
            continue;
        }
        let numeric = is_numeric(surface);
        if LABEL.is_match(surface) && !followed_by_unit(i) {
            let prev_is_cue = i > 0
                && (LABEL_CUES.contains(&tokens[i - 1].normalized.as_str())
                    || matches!(class[i - 1], Class::Chem | Class::Gazetteer(_)));
            let next_is_copula = tokens.get(i + 1).is_some_and(|t| t.normalized == "be");
            if prev_is_cue || next_is_copula {
                class[i] = Class::Chem;
                continue;
            }
        }
        if numeric {
            class[i] = Class::Num;
        } else if is_formula(surface) || has_chem_suffix(surface) {
            class[i] = Class::Chem;
        } else if i > 0
            && class[i - 1] == Class::Chem
            && CLASS_NOUNS.contains(&tokens[i].normalized.as_str())
        {
            class[i] = Class::Chem;
        }
    }

    let mut tags = Vec::new();
    let mut i = 0;
    while i < n {
        match class[i] {
            Class::Gazetteer(len) if len > 0 => {
                tags.push(EntityTag {
                    kind: EntityKind::Chem,
                    token_start: i,
                    token_end: i + len,
                    value: join_value(&tokens[i..i + len]),
                });
                i += len;
            }
            Class::Num => {
                tags.push(EntityTag {
                    kind: EntityKind::Num,
                    token_start: i,
                    token_end: i + 1,
                    value: tokens[i].surface.clone(),
                });
                i += 1;
            }
            Class::Chem => {
                let mut j = i + 1;
                while j < n && class[j] == Class::Chem && joinable(&tokens[j - 1..=j]) {
                    j += 1;
                }
                tags.push(EntityTag {
                    kind: EntityKind::Chem,
                    token_start: i,
                    token_end: j,
                    value: join_value(&tokens[i..j]),
                });
                i = j;
            }
            _ => i += 1,
        }
    }
    tags
}
