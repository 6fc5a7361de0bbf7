use serde::{Deserialize, Serialize};

use super::file::PatternSet;
use super::{Pattern, PatternItem};
use crate::corpus::{MaskItem, MaskedText};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Match {
    pub doc_id: String,
    pub item_start: usize,
    pub pattern_id: String,
    /// Entity index of the placeholder under the argument slot.
    pub argument_entity: usize,
}

fn item_fits(p: &PatternItem, m: &MaskItem) -> bool {
    match (p, m) {
        (PatternItem::Literal(w), MaskItem::Word(n)) => w == n,
        (PatternItem::Chem { .. }, MaskItem::Chem(_)) => true,
        (PatternItem::Num { .. }, MaskItem::Num(_)) => true,
        _ => false,
    }
}

/// Every (possibly overlapping) window of `masked` that the pattern
/// reproduces item for item, in window order.
pub fn match_pattern(pattern: &Pattern, masked: &MaskedText) -> Vec<Match> {
    let width = pattern.items.len();
    if width == 0 || masked.items.len() < width {
        return Vec::new();
    }
    let arg = pattern.argument_offset();
    masked
        .items
        .windows(width)
        .enumerate()
        .filter(|(_, window)| pattern.items.iter().zip(window.iter()).all(|(p, m)| item_fits(p, m)))
        .map(|(start, window)| Match {
            doc_id: masked.doc_id.clone(),
            item_start: start,
            pattern_id: pattern.id.clone(),
            argument_entity: window[arg].entity_index().expect("argument slot sits on a placeholder"),
        })
        .collect()
}

/// Union of [`match_pattern`] over the set, in pattern order then window order.
pub fn match_all(set: &PatternSet, masked: &MaskedText) -> Vec<Match> {
    set.patterns().iter().flat_map(|p| match_pattern(p, masked)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::prepare_text;
    use crate::corpus::Gazetteer;
    use crate::pattern::parse_pattern;

    fn masked(items: Vec<MaskItem>) -> MaskedText {
        let n = items.len();
        MaskedText {
            doc_id: "t".into(),
            items,
            entities: Vec::new(),
            spans: vec![(0, 0); n],
            surfaces: vec![String::new(); n],
        }
    }

    fn w(s: &str) -> MaskItem {
        MaskItem::Word(s.into())
    }

    #[test]
    fn to_yield_window() {
        let m = masked(vec![w("the"), w("mixture"), w("heated"), w("to"), w("yield"), MaskItem::Chem(2), w(".")]);
        let p = parse_pattern("product", "to yield [Chem!]").unwrap();
        let got = match_pattern(&p, &m);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].argument_entity, 2);
        assert_eq!(got[0].item_start, 3);
    }

    #[test]
    fn empty_text_has_no_matches() {
        let p = parse_pattern("product", "produced [Chem!]").unwrap();
        assert!(match_pattern(&p, &masked(vec![])).is_empty());
    }

    #[test]
    fn repeated_conversions() {
        let m = masked(vec![
            w("conversion"), w("of"), MaskItem::Chem(0), w("to"), MaskItem::Chem(1), w("and"),
            w("conversion"), w("of"), MaskItem::Chem(2), w("to"), MaskItem::Chem(3),
        ]);
        let p = parse_pattern("product", "conversion of [Chem] to [Chem!]").unwrap();
        let args: Vec<usize> = match_pattern(&p, &m).iter().map(|m| m.argument_entity).collect();
        assert_eq!(args, [1, 3]);
    }

    #[test]
    fn match_all_unions_in_pattern_order() {
        assert!(match_all(&PatternSet::new(), &masked(vec![w("x")])).is_empty());

        let m = prepare_text("d", "FeCl3 was obtained and then produced benzamide and produced toluene .", &Gazetteer::builtin());
        let a = parse_pattern("product", "[Chem!] be obtained").unwrap();
        let b = parse_pattern("product", "produced [Chem!]").unwrap();
        let set = PatternSet::from_patterns(vec![a.clone(), b.clone()]);
        let got = match_all(&set, &m);
        assert_eq!(got.len(), 3);
        assert_eq!(got[0].pattern_id, a.id);
        assert!(got[1..].iter().all(|g| g.pattern_id == b.id));
        assert!(got[1].item_start < got[2].item_start);
    }

    #[test]
    fn same_window_from_two_patterns_is_kept_twice() {
        let m = masked(vec![w("to"), w("yield"), MaskItem::Chem(0)]);
        let a = parse_pattern("product", "to yield [Chem!]").unwrap();
        let b = parse_pattern("reactant", "to yield [Chem!]").unwrap();
        let set = PatternSet::from_patterns(vec![a, b]);
        let got = match_all(&set, &m);
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].item_start, got[1].item_start);
        assert_ne!(got[0].pattern_id, got[1].pattern_id);
    }
}
