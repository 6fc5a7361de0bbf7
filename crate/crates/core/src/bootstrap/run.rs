use std::collections::HashMap;
use std::fmt;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::rank::{rank_with_scores, ReviewCandidate, ScoreTable, Status};
use super::workspace::{Counts, IterationState, Workspace};
use super::{BootstrapConfig, BootstrapError, ReviewMode};
use crate::corpus::prepare_corpus;
use crate::extractor::{save_model, train};
use crate::io::write_atomic;
use crate::pattern::{dedupe_and_filter, mine_candidates, LabeledDoc, Origin, PatternSet};
use crate::supervision::{labels_to_qa, weak_label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecidedBy {
    Human,
    Auto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub candidate_id: String,
    pub verdict: Verdict,
    pub decided_by: DecidedBy,
    /// Unix seconds.
    pub timestamp: u64,
}

impl Decision {
    pub fn now(candidate_id: &str, verdict: Verdict, decided_by: DecidedBy) -> Decision {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Decision { candidate_id: candidate_id.to_string(), verdict, decided_by, timestamp }
    }
}

/// Accepts a pending candidate iff it is frequent enough and its precision
/// proxy reaches the configured bar; rejects every other pending one.
pub fn auto_accept(queue: &[ReviewCandidate], config: &BootstrapConfig) -> Vec<Decision> {
    queue
        .iter()
        .filter(|c| c.status == Status::Pending)
        .map(|c| {
            let ok = c.frequency >= config.min_freq && c.precision_proxy >= config.auto_accept_precision;
            Decision::now(&c.id, if ok { Verdict::Accept } else { Verdict::Reject }, DecidedBy::Auto)
        })
        .collect()
}

/// First verdict per candidate id.
pub(super) fn verdicts(decisions: &[Decision]) -> HashMap<&str, Verdict> {
    let mut out = HashMap::new();
    for d in decisions {
        out.entry(d.candidate_id.as_str()).or_insert(d.verdict);
    }
    out
}

pub(super) fn pending_ids(ws: &Workspace, k: u32) -> Result<Vec<String>, BootstrapError> {
    let decisions = ws.decisions(k)?;
    let decided = verdicts(&decisions);
    Ok(ws.queue(k)?.into_iter().filter(|c| !decided.contains_key(c.id.as_str())).map(|c| c.id).collect())
}

/// One round: label with the current patterns, train, relabel the corpus
/// with the model, mine and rank candidates, and persist the review queue.
/// In auto mode the queue is decided and merged immediately.
pub fn run_iteration(ws: &Workspace, config: &BootstrapConfig) -> Result<IterationState, BootstrapError> {
    config.validate()?;
    let mut state = ws.state()?;
    if let Some(last) = state.iterations.last() {
        if !last.finalized() {
            let pending = pending_ids(ws, last.iteration)?;
            return Err(if pending.is_empty() {
                BootstrapError::NotFinalized(last.iteration)
            } else {
                BootstrapError::PendingDecisions(pending)
            });
        }
    }
    let version = state.pattern_version.ok_or(BootstrapError::NoPatterns)?;
    let set = ws.patterns(version)?;
    if set.is_empty() {
        return Err(BootstrapError::NoPatterns);
    }
    let corpus = ws.corpus()?;
    let masked = prepare_corpus(&corpus, &ws.gazetteer()?);
    let k = state.iterations.len() as u32 + 1;

    let labels: Vec<_> = weak_label(&masked, &set)
        .into_iter()
        .filter(|l| config.linguistic_roles.contains(&l.role))
        .collect();
    let qa = labels_to_qa(&labels, &corpus, config.negative_ratio, config.hyper.seed.wrapping_add(k as u64));
    let model = train(&qa, &masked, config.hyper)?.with_threshold(config.threshold)?;
    let model_path = Workspace::model_rel(k);
    save_model(&model, &ws.path(&model_path))?;

    let table = ScoreTable::build(&model, &masked, &config.linguistic_roles)?;
    let labeled: Vec<LabeledDoc<'_>> =
        masked.iter().enumerate().map(|(d, m)| LabeledDoc { masked: m, labels: table.labels(d) }).collect();
    let mut mined = mine_candidates(&labeled, config.mine)?;
    mined.retain(|c| !state.rejected.contains(&c.id()));
    let filtered = dedupe_and_filter(&mined, &set, config.min_freq);
    let queue = rank_with_scores(&filtered, &table, &masked, config.top_k_per_role);

    ws.write_queue(k, &queue)?;
    write_atomic(&ws.decisions_path(k), b"")?;
    let it = IterationState {
        iteration: k,
        pattern_set_version_before: version,
        pattern_set_version_after: None,
        counts: Counts { labels: labels.len(), qa_examples: qa.len(), candidates: queue.len(), accepted: 0, rejected: 0 },
        model_path,
    };
    state.iterations.push(it.clone());
    ws.save_state(&state)?;

    if config.review_mode == ReviewMode::Auto {
        ws.append_decisions(k, &auto_accept(&queue, config))?;
        apply_decisions(ws, k)?;
        return Ok(ws.state()?.iteration(k)?.clone());
    }
    Ok(it)
}

/// Merges the accepted candidates of iteration `k` as enriched patterns,
/// persists the new version, and remembers the rejected ids.
pub fn apply_decisions(ws: &Workspace, k: u32) -> Result<PatternSet, BootstrapError> {
    let mut state = ws.state()?;
    let it = state.iteration(k)?.clone();
    if it.finalized() {
        return Err(BootstrapError::AlreadyFinalized(k));
    }
    let queue = ws.queue(k)?;
    let decisions = ws.decisions(k)?;
    let decided = verdicts(&decisions);
    let pending: Vec<String> = queue.iter().filter(|c| !decided.contains_key(c.id.as_str())).map(|c| c.id.clone()).collect();
    if !pending.is_empty() {
        return Err(BootstrapError::PendingDecisions(pending));
    }

    let mut set = ws.patterns(it.pattern_set_version_before)?;
    let mut accepted = Vec::new();
    let mut rejected = 0;
    for c in &queue {
        match decided[c.id.as_str()] {
            Verdict::Accept => accepted.push(c.to_pattern(Origin::Enriched { iteration: k })?),
            Verdict::Reject => {
                rejected += 1;
                state.rejected.insert(c.id.clone());
            }
        }
    }
    let n_accepted = accepted.len();
    if set.merge(accepted) > 0 {
        ws.write_patterns(&set)?;
    }
    state.pattern_version = Some(set.version);
    let entry = state.iteration_mut(k)?;
    entry.pattern_set_version_after = Some(set.version);
    entry.counts.accepted = n_accepted;
    entry.counts.rejected = rejected;
    let report = entry.clone();
    ws.save_state(&state)?;
    let mut body = serde_json::to_string_pretty(&report).expect("state serializes");
    body.push('\n');
    write_atomic(&ws.report_path(k), body.as_bytes())?;
    Ok(set)
}

/// Runs iterations until `config.iterations` are finalized. Interactive
/// mode stops after queueing one iteration for review.
pub fn run(ws: &Workspace, config: &BootstrapConfig) -> Result<Vec<IterationState>, BootstrapError> {
    let mut out = Vec::new();
    while (ws.state()?.iterations.len() as u32) < config.iterations
        || ws.state()?.iterations.last().is_some_and(|s| !s.finalized())
    {
        let it = run_iteration(ws, config)?;
        let open = !it.finalized();
        out.push(it);
        if open {
            break;
        }
    }
    Ok(out)
}
