//! Frequent n-gram mining around labeled arguments, and the redundancy
//! filter applied before review.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::file::PatternSet;
use super::{render_items, Origin, Pattern, PatternError, PatternItem};
use crate::corpus::{MaskItem, MaskedText};
use crate::role::{Role, SlotKind};

/// A masked document plus the (role, entity index) arguments labeled in it.
#[derive(Debug, Clone)]
pub struct LabeledDoc<'a> {
    pub masked: &'a MaskedText,
    pub labels: Vec<(Role, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MineConfig {
    pub n_min: usize,
    pub n_max: usize,
    /// Permits ranges outside 2..=6.
    pub allow_any_range: bool,
}

impl Default for MineConfig {
    fn default() -> Self {
        MineConfig {
            n_min: 2,
            n_max: 6,
            allow_any_range: false,
        }
    }
}

impl MineConfig {
    pub fn validate(&self) -> Result<(), PatternError> {
        let out_of_default = self.n_min < 2 || self.n_max > 6;
        if self.n_min == 0 || self.n_min > self.n_max || (out_of_default && !self.allow_any_range) {
            return Err(PatternError::InvalidRange {
                n_min: self.n_min,
                n_max: self.n_max,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinedCandidate {
    pub role: Role,
    pub items: Vec<PatternItem>,
    pub frequency: usize,
    pub sample_doc_ids: Vec<String>,
}

impl MinedCandidate {
    pub fn id(&self) -> String {
        super::pattern_key_id(self.role, &self.items)
    }

    pub fn render(&self) -> String {
        render_items(&self.items)
    }

    pub fn to_pattern(&self, origin: Origin) -> Pattern {
        Pattern::new(self.role, self.items.clone(), origin).expect("mined candidates carry one argument slot")
    }
}

const MAX_SAMPLES: usize = 5;

fn window_items(items: &[MaskItem], start: usize, arg: usize) -> Vec<PatternItem> {
    items
        .iter()
        .enumerate()
        .skip(start)
        .map(|(i, it)| match it {
            MaskItem::Word(w) => PatternItem::Literal(w.clone()),
            MaskItem::Chem(_) => PatternItem::Chem { argument: i == arg },
            MaskItem::Num(_) => PatternItem::Num { argument: i == arg },
        })
        .collect()
}

/// Every contiguous window of length `n_min..=n_max` that contains a labeled
/// argument's placeholder becomes a candidate with the argument slot at that
/// placeholder. Identical (role, items) windows aggregate their counts.
/// Duplicate labels within a document count once.
pub fn mine_candidates(docs: &[LabeledDoc<'_>], config: MineConfig) -> Result<Vec<MinedCandidate>, PatternError> {
    config.validate()?;
    let mut index: HashMap<(Role, Vec<PatternItem>), usize> = HashMap::new();
    let mut out: Vec<MinedCandidate> = Vec::new();
    for doc in docs {
        let items = &doc.masked.items;
        let positions = doc.masked.entity_positions();
        let labels: BTreeSet<(Role, usize)> = doc.labels.iter().copied().collect();
        for (role, entity) in labels {
            let Some(&pos) = positions.get(entity) else { continue };
            let kind_ok = matches!(
                (&items[pos], role.slot_kind()),
                (MaskItem::Chem(_), SlotKind::Chem) | (MaskItem::Num(_), SlotKind::Num)
            );
            if !kind_ok {
                continue;
            }
            for n in config.n_min..=config.n_max.min(items.len()) {
                let first = pos.saturating_sub(n - 1);
                let last = pos.min(items.len() - n);
                for start in first..=last {
                    let window = window_items(&items[..start + n], start, pos);
                    let slot = *index.entry((role, window.clone())).or_insert_with(|| {
                        out.push(MinedCandidate {
                            role,
                            items: window,
                            frequency: 0,
                            sample_doc_ids: Vec::new(),
                        });
                        out.len() - 1
                    });
                    let cand = &mut out[slot];
                    cand.frequency += 1;
                    if cand.sample_doc_ids.len() < MAX_SAMPLES && !cand.sample_doc_ids.contains(&doc.masked.doc_id) {
                        cand.sample_doc_ids.push(doc.masked.doc_id.clone());
                    }
                }
            }
        }
    }
    Ok(out)
}

fn canonical_order(a: &MinedCandidate, b: &MinedCandidate) -> std::cmp::Ordering {
    b.frequency
        .cmp(&a.frequency)
        .then(a.items.len().cmp(&b.items.len()))
        .then_with(|| a.role.cmp(&b.role))
        .then_with(|| a.render().cmp(&b.render()))
}

/// Strict contiguous sub-windows of `items` (same argument alignment is
/// implied because both sides carry exactly one argument slot).
fn strict_subwindows(items: &[PatternItem]) -> impl Iterator<Item = &[PatternItem]> {
    (1..items.len()).flat_map(move |len| (0..=items.len() - len).map(move |s| &items[s..s + len]))
}

/// Removes redundant candidates:
///
/// * already in `existing` (same role and items);
/// * containing a pattern of `existing` as a sub-window, since every match of
///   the longer window is already a match of the existing pattern;
/// * below `min_freq`;
/// * having a strict sub-window candidate of the same role and equal
///   frequency (the longer window never fires without the shorter one).
///
/// The result is sorted by frequency descending, then length ascending, then
/// role and rendering.
pub fn dedupe_and_filter(cands: &[MinedCandidate], existing: &PatternSet, min_freq: usize) -> Vec<MinedCandidate> {
    let pool: Vec<&MinedCandidate> = cands
        .iter()
        .filter(|c| c.frequency >= min_freq.max(1))
        .filter(|c| !existing.contains(c.role, &c.items))
        .filter(|c| !strict_subwindows(&c.items).any(|w| existing.contains(c.role, w)))
        .collect();
    let freq: HashMap<(Role, &[PatternItem]), usize> =
        pool.iter().map(|c| ((c.role, c.items.as_slice()), c.frequency)).collect();
    let mut kept: Vec<MinedCandidate> = pool
        .into_iter()
        .filter(|c| !strict_subwindows(&c.items).any(|w| freq.get(&(c.role, w)) == Some(&c.frequency)))
        .cloned()
        .collect();
    kept.sort_by(canonical_order);
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::MaskItem;
    use crate::pattern::parse_pattern;

    fn w(s: &str) -> MaskItem {
        MaskItem::Word(s.into())
    }

    fn masked(id: &str, items: Vec<MaskItem>) -> MaskedText {
        let n = items.len();
        let entities = items
            .iter()
            .filter_map(|i| i.entity_index())
            .map(|_| crate::corpus::EntityTag {
                kind: crate::corpus::EntityKind::Chem,
                token_start: 0,
                token_end: 1,
                value: "x".into(),
            })
            .collect();
        MaskedText {
            doc_id: id.into(),
            items,
            entities,
            spans: vec![(0, 0); n],
            surfaces: vec![String::new(); n],
        }
    }

    fn cand(role: &str, src: &str, f: usize) -> MinedCandidate {
        let p = parse_pattern(role, src).unwrap();
        MinedCandidate {
            role: p.role,
            items: p.items,
            frequency: f,
            sample_doc_ids: vec![],
        }
    }

    #[test]
    fn the_produced_windows() {
        let m = masked("d", vec![w("then"), w("the"), w("produced"), MaskItem::Chem(0), w(".")]);
        let docs = [LabeledDoc { masked: &m, labels: vec![(Role::Product, 0)] }];
        let got = mine_candidates(&docs, MineConfig::default()).unwrap();
        let find = |s: &str| got.iter().find(|c| c.render() == s).map(|c| c.frequency);
        assert_eq!(find("the produced [Chem!]"), Some(1));
        assert_eq!(find("produced [Chem!]"), Some(1));
        // windows of length 2..=5 around position 3 within 5 items
        let expected: usize = (2..=5).map(|n: usize| (3usize.saturating_sub(n - 1)..=3.min(5 - n)).count()).sum();
        assert_eq!(got.len(), expected);
        assert!(got.iter().all(|c| c.sample_doc_ids == ["d"]));
    }

    #[test]
    fn frequencies_aggregate() {
        let docs_items: Vec<MaskedText> = (0..7)
            .map(|i| masked(&format!("d{i}"), vec![w("heated"), w("to"), w("yield"), MaskItem::Chem(0)]))
            .collect();
        let docs: Vec<LabeledDoc> = docs_items
            .iter()
            .map(|m| LabeledDoc { masked: m, labels: vec![(Role::Product, 0), (Role::Product, 0)] })
            .collect();
        let got = mine_candidates(&docs, MineConfig::default()).unwrap();
        let c = got.iter().find(|c| c.render() == "to yield [Chem!]").unwrap();
        assert_eq!(c.frequency, 7);
        assert_eq!(c.sample_doc_ids.len(), 5);
    }

    #[test]
    fn no_labels_no_candidates() {
        let m = masked("d", vec![w("a"), MaskItem::Chem(0)]);
        let docs = [LabeledDoc { masked: &m, labels: vec![] }];
        assert!(mine_candidates(&docs, MineConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn range_validation() {
        let bad = MineConfig { n_min: 1, n_max: 6, allow_any_range: false };
        assert!(matches!(mine_candidates(&[], bad), Err(PatternError::InvalidRange { .. })));
        let bad = MineConfig { n_min: 2, n_max: 7, allow_any_range: false };
        assert!(mine_candidates(&[], bad).is_err());
        let ok = MineConfig { n_min: 1, n_max: 8, allow_any_range: true };
        assert!(mine_candidates(&[], ok).is_ok());
        let inverted = MineConfig { n_min: 4, n_max: 3, allow_any_range: true };
        assert!(mine_candidates(&[], inverted).is_err());
    }

    #[test]
    fn second_argument_of_same_role_stays_plain() {
        let m = masked("d", vec![MaskItem::Chem(0), w("and"), MaskItem::Chem(1)]);
        let docs = [LabeledDoc { masked: &m, labels: vec![(Role::Product, 0), (Role::Product, 1)] }];
        let got = mine_candidates(&docs, MineConfig::default()).unwrap();
        let renders: Vec<String> = got.iter().map(MinedCandidate::render).collect();
        assert!(renders.contains(&"[Chem!] and [Chem]".to_string()));
        assert!(renders.contains(&"[Chem] and [Chem!]".to_string()));
    }

    #[test]
    fn existing_patterns_removed() {
        let seeds = PatternSet::from_patterns(vec![parse_pattern("product", "produced [Chem!]").unwrap()]);
        let cands = vec![cand("product", "produced [Chem!]", 9), cand("product", "desired [Chem!]", 9)];
        let got = dedupe_and_filter(&cands, &seeds, 1);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].render(), "desired [Chem!]");
    }

    #[test]
    fn windows_containing_existing_patterns_removed() {
        let seeds = PatternSet::from_patterns(vec![parse_pattern("product", "produced [Chem!]").unwrap()]);
        let cands = vec![cand("product", "the produced [Chem!]", 9)];
        assert!(dedupe_and_filter(&cands, &seeds, 1).is_empty());
    }

    #[test]
    fn equal_frequency_superwindow_dropped() {
        let cands = vec![cand("product", "heated to yield [Chem!]", 7), cand("product", "to yield [Chem!]", 7)];
        let got = dedupe_and_filter(&cands, &PatternSet::new(), 1);
        let renders: Vec<String> = got.iter().map(MinedCandidate::render).collect();
        assert_eq!(renders, ["to yield [Chem!]"]);
    }

    #[test]
    fn different_frequencies_both_survive() {
        let cands = vec![cand("product", "heated to yield [Chem!]", 3), cand("product", "to yield [Chem!]", 7)];
        let got = dedupe_and_filter(&cands, &PatternSet::new(), 1);
        let renders: Vec<String> = got.iter().map(MinedCandidate::render).collect();
        assert_eq!(renders, ["to yield [Chem!]", "heated to yield [Chem!]"]);
    }

    #[test]
    fn min_freq_and_ordering() {
        let cands = vec![
            cand("product", "desired [Chem!]", 4),
            cand("product", "synthesis of [Chem!]", 6),
            cand("product", "provided [Chem!]", 6),
            cand("yield", "at [Num!] % conversion", 2),
        ];
        let got = dedupe_and_filter(&cands, &PatternSet::new(), 3);
        let renders: Vec<String> = got.iter().map(MinedCandidate::render).collect();
        assert_eq!(renders, ["provided [Chem!]", "synthesis of [Chem!]", "desired [Chem!]"]);
    }
}
