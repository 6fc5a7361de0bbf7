use std::collections::HashSet;
use std::fs;
use std::path::Path;

use super::{parse_items, Origin, Pattern, PatternError, PatternItem};
use crate::io::data_lines;
use crate::role::Role;

/// Parses `role<TAB>pattern[<TAB>origin]` lines; `#` starts a comment line.
pub fn parse_pattern_file(body: &str) -> Result<Vec<Pattern>, PatternError> {
    let mut out = Vec::new();
    for (line, raw) in data_lines(body) {
        let mut cols = raw.split('\t');
        let (Some(role), Some(source)) = (cols.next(), cols.next()) else {
            return Err(PatternError::Malformed { line });
        };
        let origin = match cols.next().map(str::trim) {
            None | Some("") | Some("seed") => Origin::Seed,
            Some(o) => match o.strip_prefix("enriched:").and_then(|k| k.parse().ok()) {
                Some(iteration) => Origin::Enriched { iteration },
                None => return Err(PatternError::Malformed { line }),
            },
        };
        let wrap = |e: PatternError| PatternError::Line { line, source: Box::new(e) };
        let role: Role = role.trim().parse().map_err(|e| wrap(PatternError::UnknownRole(e)))?;
        let pattern = Pattern::new(role, parse_items(source), origin).map_err(wrap)?;
        out.push(pattern);
    }
    Ok(out)
}

/// An ordered, duplicate-free collection of patterns with a version counter.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PatternSet {
    patterns: Vec<Pattern>,
    pub version: u32,
    keys: HashSet<(Role, Vec<PatternItem>)>,
}

impl PatternSet {
    pub fn new() -> PatternSet {
        PatternSet::default()
    }

    /// Builds a version-0 set, dropping later duplicates.
    pub fn from_patterns(patterns: impl IntoIterator<Item = Pattern>) -> PatternSet {
        let mut set = PatternSet::new();
        for p in patterns {
            set.insert(p);
        }
        set
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn contains(&self, role: Role, items: &[PatternItem]) -> bool {
        self.keys.contains(&(role, items.to_vec()))
    }

    pub fn get(&self, id: &str) -> Option<&Pattern> {
        self.patterns.iter().find(|p| p.id == id)
    }

    /// Inserts unless an equal (role, items) pattern exists. Does not bump
    /// the version.
    pub fn insert(&mut self, pattern: Pattern) -> bool {
        if self.keys.insert((pattern.role, pattern.items.clone())) {
            self.patterns.push(pattern);
            true
        } else {
            false
        }
    }

    /// Adds the new patterns and bumps the version when anything was added.
    /// Returns the number added.
    pub fn merge(&mut self, new: impl IntoIterator<Item = Pattern>) -> usize {
        let added = new.into_iter().filter(|p| self.insert(p.clone())).count();
        if added > 0 {
            self.version += 1;
        }
        added
    }

    /// Canonical file rendering, origin in a third column.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# version {}\n", self.version);
        for p in &self.patterns {
            out.push_str(&format!("{}\t{}\t{}\n", p.role, p, p.origin));
        }
        out
    }

    pub fn parse(body: &str, version: u32) -> Result<PatternSet, PatternError> {
        let mut set = PatternSet::from_patterns(parse_pattern_file(body)?);
        set.version = version;
        Ok(set)
    }

    pub fn load(path: &Path, version: u32) -> Result<PatternSet, PatternError> {
        let body = fs::read_to_string(path).map_err(|_| PatternError::Malformed { line: 0 })?;
        PatternSet::parse(&body, version)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::parse_pattern;

    #[test]
    fn file_round_trip_with_origins() {
        let mut set = PatternSet::from_patterns(vec![parse_pattern("product", "produced [Chem!]").unwrap()]);
        let mut enriched = parse_pattern("product", "to yield [Chem!]").unwrap();
        enriched.origin = Origin::Enriched { iteration: 2 };
        assert_eq!(set.merge(vec![enriched]), 1);
        assert_eq!(set.version, 1);
        let back = PatternSet::parse(&set.to_tsv(), 1).unwrap();
        assert_eq!(back.patterns(), set.patterns());
        assert_eq!(back.to_tsv(), set.to_tsv());
    }

    #[test]
    fn duplicates_do_not_bump_version() {
        let p = parse_pattern("yield", "in [Num!] % yield").unwrap();
        let mut set = PatternSet::from_patterns(vec![p.clone()]);
        assert_eq!(set.merge(vec![p]), 0);
        assert_eq!(set.version, 0);
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn bad_lines_report_position() {
        let err = parse_pattern_file("# c\nproduct\tproduced [Chem]\n").unwrap_err();
        assert!(matches!(err, PatternError::Line { line: 2, .. }));
        assert!(matches!(
            parse_pattern_file("product produced [Chem!]\n"),
            Err(PatternError::Malformed { line: 1 })
        ));
    }
}
