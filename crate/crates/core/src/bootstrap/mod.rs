//! The iterative pattern bootstrap: label with patterns, train, relabel
//! with the model, mine frequent windows, review, merge.

mod config;
mod rank;
mod review;
mod run;
mod workspace;

pub use config::{BootstrapConfig, ReviewMode};
pub use rank::{precision_proxy, rank_candidates, rank_with_scores, ReviewCandidate, ScoreTable, Snippet, Status};
pub use review::{FinalizeOutcome, IterationSummary, ReviewService};
pub use run::{apply_decisions, auto_accept, run, run_iteration, Decision, DecidedBy, Verdict};
pub use workspace::{Counts, IterationState, LockGuard, State, Workspace};

use crate::corpus::CorpusError;
use crate::extractor::ExtractorError;
use crate::pattern::PatternError;
use crate::supervision::SupervisionError;

#[derive(Debug, thiserror::Error)]
pub enum BootstrapError {
    #[error("the workspace corpus is empty")]
    EmptyCorpus,
    #[error("no patterns: run seed-label first")]
    NoPatterns,
    #[error("unknown candidate `{0}`")]
    UnknownCandidate(String),
    #[error("unknown iteration {0}")]
    UnknownIteration(u32),
    #[error("iteration {0} is already finalized")]
    AlreadyFinalized(u32),
    #[error("candidate `{id}` already has verdict `{existing}`")]
    ConflictingDecision { id: String, existing: Verdict },
    #[error("{} candidates still pending: {}", .0.len(), .0.join(", "))]
    PendingDecisions(Vec<String>),
    #[error("iteration {0} is decided but not finalized; run `review finalize --iteration {0}`")]
    NotFinalized(u32),
    #[error("workspace is locked by {0}; remove it if no other command is running")]
    Locked(std::path::PathBuf),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: line {line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Extractor(#[from] ExtractorError),
    #[error(transparent)]
    Supervision(#[from] SupervisionError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
