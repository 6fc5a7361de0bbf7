#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rxnmine::io::write_jsonl;
use rxnmine::pipeline::write_reactions;
use rxnmine::synth::{generate, patent_records, SynthConfig, SynthCorpus};
use tempfile::TempDir;

pub struct Fixture {
    pub dir: TempDir,
    pub synth: SynthCorpus,
}

impl Fixture {
    pub fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    pub fn ws(&self) -> PathBuf {
        self.path("ws")
    }

    /// Runs the binary against this fixture's workspace.
    pub fn run(&self, args: &[&str]) -> Run {
        let ws = self.ws();
        let mut full = vec!["--workspace", ws.to_str().unwrap()];
        full.extend_from_slice(args);
        rxnmine(&full, self.dir.path())
    }
}

/// The 200-document corpus used across the bootstrap tests, plus a small
/// held-out split.
pub fn small() -> SynthConfig {
    SynthConfig {
        solo_per_template: 1,
        bridge_per_template: 2,
        seed_docs_per_role: 14,
        distractor_share: 0.0,
        heldout_docs: 40,
        ..SynthConfig::default()
    }
}

/// Writes `corpus.jsonl`, `heldout.jsonl`, `heldout_gold.jsonl`,
/// `train_gold.jsonl` and `patents.jsonl` into a fresh directory.
pub fn fixture(config: SynthConfig) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let synth = generate(&config);
    let p = |rel: &str| dir.path().join(rel);
    write_jsonl(&p("corpus.jsonl"), &synth.train).unwrap();
    write_jsonl(&p("heldout.jsonl"), &synth.heldout).unwrap();
    write_reactions(&p("heldout_gold.jsonl"), &synth.heldout_gold).unwrap();
    write_reactions(&p("train_gold.jsonl"), &synth.train_gold).unwrap();
    write_jsonl(&p("patents.jsonl"), &patent_records(60, config.seed)).unwrap();
    Fixture { dir, synth }
}

#[derive(Debug)]
pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    #[track_caller]
    pub fn ok(self) -> Run {
        assert_eq!(self.code, 0, "stdout:\n{}\nstderr:\n{}", self.stdout, self.stderr);
        self
    }

    /// The structured error line.
    pub fn error(&self) -> serde_json::Value {
        let line = self.stderr.lines().last().unwrap_or_default();
        serde_json::from_str(line).unwrap_or_else(|_| panic!("stderr is not a JSON error line: {}", self.stderr))
    }
}

pub fn rxnmine(args: &[&str], cwd: &Path) -> Run {
    let out: Output = Command::new(env!("CARGO_BIN_EXE_rxnmine")).args(args).current_dir(cwd).output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}
