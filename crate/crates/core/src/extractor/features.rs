use crate::corpus::{MaskItem, MaskedText};

use super::candidate::{Candidate, CandidateKind};
use super::normalize_argument;

/// Context items considered on each side of a candidate.
pub const CONTEXT_WINDOW: usize = 4;
pub const MAX_NGRAM: usize = 3;

fn render(item: &MaskItem) -> &str {
    match item {
        MaskItem::Word(w) => w,
        other => other.render(),
    }
}

fn distance_bucket(d: usize) -> &'static str {
    match d {
        0 => "0",
        1 => "1",
        2 => "2",
        3..=5 => "3-5",
        _ => "6+",
    }
}

/// Indicator features for one candidate, sorted and deduplicated.
///
/// Left n-grams read outward from the candidate: `L2:to yield` is the two
/// items immediately before it, `L1@2:of` is one item starting two items
/// further away. Right n-grams mirror that with `R`.
pub fn featurize(candidate: &Candidate, masked: &MaskedText, condition_product: Option<&str>) -> Vec<String> {
    let items = &masked.items;
    let start = candidate.item_index;
    let end = start + candidate.item_len;
    let mut out = Vec::new();

    for n in 1..=MAX_NGRAM {
        for o in 0..=(CONTEXT_WINDOW - n) {
            let tag = if o == 0 { String::new() } else { format!("@{o}") };
            // left: items [start-o-n, start-o)
            if start >= o + n {
                let gram: Vec<&str> = items[start - o - n..start - o].iter().map(render).collect();
                out.push(format!("L{n}{tag}:{}", gram.join(" ")));
            }
            if end + o + n <= items.len() {
                let gram: Vec<&str> = items[end + o..end + o + n].iter().map(render).collect();
                out.push(format!("R{n}{tag}:{}", gram.join(" ")));
            }
        }
    }

    let third = if items.is_empty() { 0 } else { start * 3 / items.len() };
    out.push(
        match third {
            0 => "pos:first",
            1 => "pos:middle",
            _ => "pos:last",
        }
        .to_string(),
    );
    out.push(format!("kind:{}", candidate.kind.as_str()));
    // Product names are open-class; their identity would only be memorized.
    if condition_product.is_some() && matches!(candidate.kind, CandidateKind::Chem | CandidateKind::Lexicon) {
        out.push(format!("val:{}", normalize_argument(&candidate.value)));
    }

    if let Some(cond) = condition_product {
        let cond = normalize_argument(cond);
        if normalize_argument(&candidate.value) == cond {
            out.push("eqcond".to_string());
        }
        let nearest = items
            .iter()
            .enumerate()
            .filter_map(|(j, item)| match item {
                MaskItem::Chem(e) if normalize_argument(&masked.entities[*e].value) == cond => Some(j),
                _ => None,
            })
            .map(|j| if j < start { start - j } else { j.saturating_sub(end - 1) })
            .min();
        out.push(match nearest {
            Some(d) => format!("dist:{}", distance_bucket(d)),
            None => "dist:none".to_string(),
        });
    }

    out.sort();
    out.dedup();
    out
}
