use serde::{Deserialize, Serialize};

use super::rank::{ReviewCandidate, Status};
use super::run::{apply_decisions, pending_ids, verdicts, DecidedBy, Decision, Verdict};
use super::workspace::{Counts, Workspace};
use super::BootstrapError;
use crate::role::Role;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationSummary {
    pub iteration: u32,
    pub finalized: bool,
    pub pattern_set_version_before: u32,
    pub pattern_set_version_after: Option<u32>,
    pub counts: Counts,
    pub pending: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalizeOutcome {
    pub iteration: u32,
    pub version: u32,
    pub patterns: usize,
}

/// The operations behind the review API. Callers serialize writes (the
/// HTTP server holds this behind a mutex).
#[derive(Debug, Clone)]
pub struct ReviewService {
    ws: Workspace,
}

impl ReviewService {
    pub fn new(ws: Workspace) -> ReviewService {
        ReviewService { ws }
    }

    pub fn workspace(&self) -> &Workspace {
        &self.ws
    }

    pub fn list_iterations(&self) -> Result<Vec<IterationSummary>, BootstrapError> {
        let state = self.ws.state()?;
        state
            .iterations
            .iter()
            .map(|it| {
                let pending = if it.finalized() { 0 } else { pending_ids(&self.ws, it.iteration)?.len() };
                Ok(IterationSummary {
                    iteration: it.iteration,
                    finalized: it.finalized(),
                    pattern_set_version_before: it.pattern_set_version_before,
                    pattern_set_version_after: it.pattern_set_version_after,
                    counts: it.counts,
                    pending,
                })
            })
            .collect()
    }

    /// The queue of iteration `k` in served order with current statuses.
    pub fn list_candidates(&self, k: u32, role: Option<Role>) -> Result<Vec<ReviewCandidate>, BootstrapError> {
        self.ws.state()?.iteration(k)?;
        let decisions = self.ws.decisions(k)?;
        let decided = verdicts(&decisions);
        Ok(self
            .ws
            .queue(k)?
            .into_iter()
            .filter(|c| role.is_none_or(|r| c.role == r))
            .map(|mut c| {
                c.status = match decided.get(c.id.as_str()) {
                    Some(Verdict::Accept) => Status::Accepted,
                    Some(Verdict::Reject) => Status::Rejected,
                    None => Status::Pending,
                };
                c
            })
            .collect())
    }

    /// Records a human verdict in the open iteration holding the candidate.
    /// Repeating the same verdict is a no-op; a different one is refused.
    pub fn record_decision(&self, candidate_id: &str, verdict: Verdict) -> Result<ReviewCandidate, BootstrapError> {
        let state = self.ws.state()?;
        let mut finalized_hit = None;
        for it in state.iterations.iter().rev() {
            let Some(c) = self.ws.queue(it.iteration)?.into_iter().find(|c| c.id == candidate_id) else {
                continue;
            };
            if it.finalized() {
                finalized_hit.get_or_insert(it.iteration);
                continue;
            }
            let decisions = self.ws.decisions(it.iteration)?;
            match verdicts(&decisions).get(candidate_id) {
                Some(&existing) if existing != verdict => {
                    return Err(BootstrapError::ConflictingDecision { id: candidate_id.to_string(), existing })
                }
                Some(_) => {}
                None => self
                    .ws
                    .append_decisions(it.iteration, &[Decision::now(candidate_id, verdict, DecidedBy::Human)])?,
            }
            let status = match verdict {
                Verdict::Accept => Status::Accepted,
                Verdict::Reject => Status::Rejected,
            };
            return Ok(ReviewCandidate { status, ..c });
        }
        Err(match finalized_hit {
            Some(k) => BootstrapError::AlreadyFinalized(k),
            None => BootstrapError::UnknownCandidate(candidate_id.to_string()),
        })
    }

    pub fn finalize(&self, k: u32) -> Result<FinalizeOutcome, BootstrapError> {
        let set = apply_decisions(&self.ws, k)?;
        Ok(FinalizeOutcome { iteration: k, version: set.version, patterns: set.len() })
    }
}
