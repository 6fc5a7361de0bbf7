//! QA-style extraction: role questions, candidate spans, indicator
//! features and a per-role logistic model that scores every candidate.

mod candidate;
mod features;
mod model;
mod question;

pub use candidate::{generate_candidates, generate_candidates_with, Candidate, CandidateKind, ReactionLexicon};
pub use features::{featurize, CONTEXT_WINDOW, MAX_NGRAM};
pub use model::{
    build_instances, load_model, logistic_gradient, logistic_loss, predict, save_model, score_candidates, sigmoid, train,
    train_instances, train_with_report, AnswerSpan, ExtractorModel, Hyper, Instance, RoleWeights, ScoredCandidate,
    TrainReport, MODEL_FORMAT, MODEL_VERSION,
};
pub use question::{question_for_role, PRODUCT_QUESTION};

use crate::role::Role;

#[derive(Debug, thiserror::Error)]
pub enum ExtractorError {
    #[error("role `{0}` needs a condition product")]
    MissingCondition(Role),
    #[error("no training instances")]
    EmptyTrainingSet,
    #[error("UntrainedRole: the model has no weights for `{0}`")]
    UntrainedRole(Role),
    #[error("document `{0}` is not in the corpus")]
    MissingDocument(String),
    #[error("invalid threshold {0}")]
    InvalidThreshold(f64),
    #[error("model file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Canonical form used when comparing argument strings: lowercase, single
/// spaces, one layer of enclosing brackets and trailing sentence punctuation
/// removed.
pub fn normalize_argument(s: &str) -> String {
    let mut t = s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    loop {
        let trimmed = t.trim_end_matches(['.', ',', ';', ':']).trim_end();
        if trimmed.len() == t.len() {
            break;
        }
        t = trimmed.to_string();
    }
    for (open, close) in [('(', ')'), ('[', ']'), ('{', '}')] {
        if t.len() >= 2 && t.starts_with(open) && t.ends_with(close) && encloses(&t, open, close) {
            t = t[1..t.len() - 1].trim().to_string();
            break;
        }
    }
    t
}

/// [`normalize_argument`] with all whitespace removed, so "85%" and "85 %"
/// label the same candidate.
pub fn compact_argument(s: &str) -> String {
    normalize_argument(s).split_whitespace().collect()
}

// true when the bracket at the start closes only at the very end
fn encloses(t: &str, open: char, close: char) -> bool {
    let mut depth = 0usize;
    for (i, c) in t.char_indices() {
        if c == open {
            depth += 1;
        } else if c == close {
            depth = depth.saturating_sub(1);
            if depth == 0 {
                return i + c.len_utf8() == t.len();
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        assert_eq!(normalize_argument("  FeCl3 "), "fecl3");
        assert_eq!(normalize_argument("(5e)."), "5e");
        assert_eq!(normalize_argument("  5e."), "5e");
        assert_eq!(normalize_argument("(85 %)"), "85 %");
        assert_eq!(compact_argument("85 %"), compact_argument("85%"));
        assert_eq!(normalize_argument("Lithium\n benzyl   oxide"), "lithium benzyl oxide");
        assert_eq!(normalize_argument("(a) and (b)"), "(a) and (b)");
    }
}
