//! Synthetic supervision: pattern matches become weak labels and QA
//! examples, and patent-style records become QA examples directly.

mod patent;
mod qa;
mod weak;

pub use patent::{filter_patent_records, load_patent_records, parse_patent_records, patent_to_qa, DatasetStats, PatentRecord};
pub use qa::{contexts_as_corpus, labels_to_qa, load_qa_dataset, parse_qa_dataset, write_qa_dataset, QAExample};
pub use weak::{weak_label, WeakLabel, Provenance};

#[derive(Debug, thiserror::Error)]
pub enum SupervisionError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("document `{0}` appears with two different contexts")]
    ConflictingContext(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Case-insensitive containment that treats any whitespace run as one space.
pub fn contains_ci(haystack: &str, needle: &str) -> bool {
    fn fold(s: &str) -> String {
        s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
    }
    fold(haystack).contains(&fold(needle))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn containment_folds_case_and_spacing() {
        assert!(contains_ci("Then FeCl3\nwas  added", "fecl3 was added"));
        assert!(!contains_ci("FeCl3", "FeCl2"));
    }
}
