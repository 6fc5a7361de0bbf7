use std::collections::BTreeSet;
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::rank::ReviewCandidate;
use super::run::Decision;
use super::BootstrapError;
use crate::corpus::{parse_corpus, Document, Gazetteer};
use crate::io::{jsonl_lines, to_jsonl, write_atomic};
use crate::pattern::PatternSet;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub labels: usize,
    pub qa_examples: usize,
    pub candidates: usize,
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationState {
    pub iteration: u32,
    pub pattern_set_version_before: u32,
    /// Set when the iteration is finalized.
    pub pattern_set_version_after: Option<u32>,
    pub counts: Counts,
    pub model_path: String,
}

impl IterationState {
    pub fn finalized(&self) -> bool {
        self.pattern_set_version_after.is_some()
    }
}

/// Everything the bootstrap remembers between commands.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct State {
    pub pattern_version: Option<u32>,
    pub iterations: Vec<IterationState>,
    /// Candidate ids rejected in any finalized iteration; never proposed again.
    pub rejected: BTreeSet<String>,
}

impl State {
    pub fn iteration(&self, k: u32) -> Result<&IterationState, BootstrapError> {
        self.iterations.iter().find(|s| s.iteration == k).ok_or(BootstrapError::UnknownIteration(k))
    }

    pub fn iteration_mut(&mut self, k: u32) -> Result<&mut IterationState, BootstrapError> {
        self.iterations.iter_mut().find(|s| s.iteration == k).ok_or(BootstrapError::UnknownIteration(k))
    }
}

/// Exclusive hold on a workspace; released on drop.
#[derive(Debug)]
pub struct LockGuard {
    path: PathBuf,
}

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// A bootstrap workspace directory:
///
/// ```text
/// corpus.jsonl
/// gazetteer.txt            (optional, else the built-in list)
/// patterns/v{N}.tsv
/// iterations/{k}/queue.jsonl
/// iterations/{k}/decisions.jsonl
/// iterations/{k}/report.json
/// models/{k}.json
/// state.json
/// ```
#[derive(Debug, Clone)]
pub struct Workspace {
    root: PathBuf,
}

impl Workspace {
    pub fn open(root: impl Into<PathBuf>) -> Workspace {
        Workspace { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn corpus_path(&self) -> PathBuf {
        self.path("corpus.jsonl")
    }

    pub fn patterns_path(&self, version: u32) -> PathBuf {
        self.path(&format!("patterns/v{version}.tsv"))
    }

    pub fn iteration_dir(&self, k: u32) -> PathBuf {
        self.path(&format!("iterations/{k}"))
    }

    pub fn queue_path(&self, k: u32) -> PathBuf {
        self.iteration_dir(k).join("queue.jsonl")
    }

    pub fn decisions_path(&self, k: u32) -> PathBuf {
        self.iteration_dir(k).join("decisions.jsonl")
    }

    pub fn report_path(&self, k: u32) -> PathBuf {
        self.iteration_dir(k).join("report.json")
    }

    pub fn model_rel(k: u32) -> String {
        format!("models/{k}.json")
    }

    pub fn lock(&self) -> Result<LockGuard, BootstrapError> {
        fs::create_dir_all(&self.root)?;
        let path = self.path(".lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(LockGuard { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(BootstrapError::Locked(path)),
            Err(e) => Err(e.into()),
        }
    }

    pub fn state(&self) -> Result<State, BootstrapError> {
        let path = self.path("state.json");
        if !path.exists() {
            return Ok(State::default());
        }
        serde_json::from_str(&fs::read_to_string(&path)?).map_err(|e| BootstrapError::Parse {
            path: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn save_state(&self, state: &State) -> Result<(), BootstrapError> {
        let mut body = serde_json::to_string_pretty(state).expect("state serializes");
        body.push('\n');
        write_atomic(&self.path("state.json"), body.as_bytes())?;
        Ok(())
    }

    /// Validates and stores the corpus in canonical JSONL form.
    pub fn ingest(&self, docs: &[Document]) -> Result<(), BootstrapError> {
        write_atomic(&self.corpus_path(), to_jsonl(docs).as_bytes())?;
        Ok(())
    }

    pub fn corpus(&self) -> Result<Vec<Document>, BootstrapError> {
        let path = self.corpus_path();
        if !path.exists() {
            return Err(BootstrapError::EmptyCorpus);
        }
        let docs = parse_corpus(&fs::read_to_string(&path)?)?;
        if docs.is_empty() {
            return Err(BootstrapError::EmptyCorpus);
        }
        Ok(docs)
    }

    pub fn gazetteer(&self) -> Result<Gazetteer, BootstrapError> {
        let path = self.path("gazetteer.txt");
        if path.exists() {
            Ok(Gazetteer::load(&path)?)
        } else {
            Ok(Gazetteer::builtin())
        }
    }

    pub fn write_patterns(&self, set: &PatternSet) -> Result<(), BootstrapError> {
        write_atomic(&self.patterns_path(set.version), set.to_tsv().as_bytes())?;
        Ok(())
    }

    /// The pattern set at the version recorded in the state.
    pub fn current_patterns(&self) -> Result<PatternSet, BootstrapError> {
        let version = self.state()?.pattern_version.ok_or(BootstrapError::NoPatterns)?;
        self.patterns(version)
    }

    pub fn patterns(&self, version: u32) -> Result<PatternSet, BootstrapError> {
        let path = self.patterns_path(version);
        if !path.exists() {
            return Err(BootstrapError::NoPatterns);
        }
        Ok(PatternSet::parse(&fs::read_to_string(path)?, version)?)
    }

    /// Installs a seed set as version 0, resetting iteration state.
    pub fn install_seeds(&self, seeds: &PatternSet) -> Result<(), BootstrapError> {
        if seeds.is_empty() {
            return Err(BootstrapError::NoPatterns);
        }
        let mut v0 = seeds.clone();
        v0.version = 0;
        self.write_patterns(&v0)?;
        self.save_state(&State { pattern_version: Some(0), ..State::default() })
    }

    pub fn write_queue(&self, k: u32, queue: &[ReviewCandidate]) -> Result<(), BootstrapError> {
        write_atomic(&self.queue_path(k), to_jsonl(queue).as_bytes())?;
        Ok(())
    }

    pub fn queue(&self, k: u32) -> Result<Vec<ReviewCandidate>, BootstrapError> {
        read_jsonl(&self.queue_path(k))
    }

    pub fn decisions(&self, k: u32) -> Result<Vec<Decision>, BootstrapError> {
        let path = self.decisions_path(k);
        if !path.exists() {
            return Ok(Vec::new());
        }
        read_jsonl(&path)
    }

    /// Appends to the decision log of iteration `k`.
    pub fn append_decisions(&self, k: u32, decisions: &[Decision]) -> Result<(), BootstrapError> {
        let path = self.decisions_path(k);
        fs::create_dir_all(self.iteration_dir(k))?;
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        f.write_all(to_jsonl(decisions).as_bytes())?;
        f.sync_data()?;
        Ok(())
    }
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, BootstrapError> {
    let body = fs::read_to_string(path)?;
    jsonl_lines(&body)
        .map(|(line, raw)| {
            serde_json::from_str(raw).map_err(|e| BootstrapError::Parse {
                path: path.display().to_string(),
                line,
                message: e.to_string(),
            })
        })
        .collect()
}
