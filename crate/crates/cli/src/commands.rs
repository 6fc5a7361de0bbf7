//! One function per subcommand. Each returns the text printed on stdout.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rxnmine::bootstrap::{self, ReviewService, Status, Workspace};
use rxnmine::corpus::{load_corpus, prepare, prepare_corpus, Gazetteer};
use rxnmine::extractor::{load_model, save_model, train_with_report};
use rxnmine::io::write_atomic;
use rxnmine::pattern::{seed_patterns, PatternSet};
use rxnmine::pipeline::{
    evaluate_products, evaluate_roles, extract_all, extract_with_products, products_by_doc, read_reactions,
    write_reactions, Conditioning, DocReactions, EvalReport,
};
use rxnmine::supervision::{
    contexts_as_corpus, filter_patent_records, labels_to_qa, load_patent_records, load_qa_dataset, patent_to_qa,
    weak_label, write_qa_dataset,
};
use rxnmine::io::write_jsonl;
use serde::Serialize;

use crate::config::AppConfig;
use crate::error::{CliError, Exit};

pub const LINGUISTIC_DATASET: &str = "datasets/linguistic.jsonl";
pub const DISTANT_DATASET: &str = "datasets/distant.jsonl";
pub const DISTANT_STATS: &str = "datasets/distant_stats.json";
pub const LABELS: &str = "labels.jsonl";
pub const FINAL_MODEL: &str = "models/final.json";
pub const CONFIG_COPY: &str = "config.txt";

/// A command's view of the world: effective config and workspace.
#[derive(Debug, Clone)]
pub struct Ctx {
    pub config: AppConfig,
    pub ws: Workspace,
}

/// The flag value, else the config value, and it must exist on disk.
fn input(flag: Option<PathBuf>, configured: &Option<PathBuf>, key: &str) -> Result<PathBuf, CliError> {
    let path = flag
        .or_else(|| configured.clone())
        .ok_or_else(|| CliError::usage(format!("no {key} file: pass --{key} or set `{key}` in the config")))?;
    if !path.exists() {
        return Err(CliError::missing_file(&path));
    }
    Ok(path)
}

fn existing(path: &Path) -> Result<&Path, CliError> {
    if path.exists() {
        Ok(path)
    } else {
        Err(CliError::missing_file(path))
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializes");
    s.push('\n');
    s
}

pub fn ingest(ctx: &Ctx, corpus: Option<PathBuf>, gazetteer: Option<PathBuf>) -> Result<String, CliError> {
    let corpus = input(corpus, &ctx.config.paths.corpus, "corpus")?;
    let gazetteer = match gazetteer.or_else(|| ctx.config.paths.gazetteer.clone()) {
        Some(p) => Some(existing(&p)?.to_path_buf()),
        None => None,
    };
    let _lock = ctx.ws.lock()?;
    let docs = load_corpus(&corpus)?;
    if docs.is_empty() {
        return Err(bootstrap::BootstrapError::EmptyCorpus.into());
    }
    ctx.ws.ingest(&docs)?;
    let mut out = format!("ingested {} documents into {}\n", docs.len(), ctx.ws.root().display());
    if let Some(p) = gazetteer {
        let names = Gazetteer::load(&p)?;
        write_atomic(&ctx.ws.path("gazetteer.txt"), fs::read(&p)?.as_slice())?;
        let _ = writeln!(out, "gazetteer: {} names", names.len());
    }
    Ok(out)
}

/// Labels the corpus with the current pattern set and writes the labels
/// plus the QA dataset built from them.
pub fn export_linguistic(ws: &Workspace, config: &AppConfig) -> Result<(usize, usize), CliError> {
    let b = &config.bootstrap;
    let corpus = ws.corpus()?;
    let masked = prepare_corpus(&corpus, &ws.gazetteer()?);
    let set = ws.current_patterns()?;
    let labels: Vec<_> = weak_label(&masked, &set)
        .into_iter()
        .filter(|l| b.linguistic_roles.contains(&l.role))
        .collect();
    let qa = labels_to_qa(&labels, &corpus, b.negative_ratio, b.hyper.seed);
    write_jsonl(&ws.path(LABELS), &labels)?;
    write_qa_dataset(&ws.path(LINGUISTIC_DATASET), &qa)?;
    Ok((labels.len(), qa.len()))
}

pub fn seed_label(ctx: &Ctx, seeds: Option<PathBuf>) -> Result<String, CliError> {
    let seeds = match seeds.or_else(|| ctx.config.paths.seeds.clone()) {
        Some(p) => Some(existing(&p)?.to_path_buf()),
        None => None,
    };
    let _lock = ctx.ws.lock()?;
    let set = match &seeds {
        Some(p) => PatternSet::load(p, 0)?,
        None => seed_patterns(),
    };
    ctx.ws.install_seeds(&set)?;
    let (labels, qa) = export_linguistic(&ctx.ws, &ctx.config)?;
    Ok(format!(
        "installed {} seed patterns as v0 ({})\nweak labels: {labels} -> {LABELS}\nqa examples: {qa} -> {LINGUISTIC_DATASET}\n",
        set.len(),
        seeds.as_deref().map_or("built-in".to_string(), |p| p.display().to_string()),
    ))
}

pub fn distant_build(ctx: &Ctx, patents: Option<PathBuf>) -> Result<String, CliError> {
    let patents = input(patents, &ctx.config.paths.patents, "patents")?;
    let _lock = ctx.ws.lock()?;
    let records = load_patent_records(&patents)?;
    let (kept, stats) = filter_patent_records(&records);
    let qa = patent_to_qa(&kept);
    write_qa_dataset(&ctx.ws.path(DISTANT_DATASET), &qa)?;
    write_atomic(&ctx.ws.path(DISTANT_STATS), pretty(&stats).as_bytes())?;
    Ok(format!(
        "records: {}\nkept: {}\ndropped_short: {}\ndropped_long: {}\ndropped_missing_arg: {}\nqa examples: {} -> {DISTANT_DATASET}\n",
        stats.input_count,
        stats.kept,
        stats.dropped_short,
        stats.dropped_long,
        stats.dropped_missing_arg,
        qa.len()
    ))
}

pub fn bootstrap_run(ctx: &Ctx) -> Result<String, CliError> {
    ctx.config.validate()?;
    let _lock = ctx.ws.lock()?;
    write_atomic(&ctx.ws.path(CONFIG_COPY), ctx.config.to_text().as_bytes())?;
    let done = bootstrap::run(&ctx.ws, &ctx.config.bootstrap)?;
    let mut out = String::new();
    for it in &done {
        let c = it.counts;
        let _ = write!(
            out,
            "iteration {}: labels {}, qa {}, candidates {}",
            it.iteration, c.labels, c.qa_examples, c.candidates
        );
        match it.pattern_set_version_after {
            Some(v) => {
                let _ = writeln!(
                    out,
                    ", accepted {}, rejected {}, patterns v{} -> v{v}",
                    c.accepted, c.rejected, it.pattern_set_version_before
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    ", queued for review in {}",
                    ctx.ws.queue_path(it.iteration).display()
                );
            }
        }
    }
    if done.is_empty() {
        let _ = writeln!(out, "all {} iterations already finalized", ctx.config.bootstrap.iterations);
    }
    if done.last().is_none_or(|it| it.finalized()) {
        let (labels, qa) = export_linguistic(&ctx.ws, &ctx.config)?;
        let _ = writeln!(out, "weak labels: {labels}, qa examples: {qa} -> {LINGUISTIC_DATASET}");
    }
    Ok(out)
}

pub fn review_finalize(ctx: &Ctx, iteration: u32) -> Result<String, CliError> {
    let _lock = ctx.ws.lock()?;
    let outcome = ReviewService::new(ctx.ws.clone()).finalize(iteration)?;
    let (labels, qa) = export_linguistic(&ctx.ws, &ctx.config)?;
    Ok(format!(
        "iteration {} finalized: pattern set v{} with {} patterns\nweak labels: {labels}, qa examples: {qa} -> {LINGUISTIC_DATASET}\n",
        outcome.iteration, outcome.version, outcome.patterns
    ))
}

pub fn train(ctx: &Ctx, datasets: Vec<PathBuf>) -> Result<String, CliError> {
    ctx.config.validate()?;
    let datasets = if datasets.is_empty() {
        let found: Vec<PathBuf> = [LINGUISTIC_DATASET, DISTANT_DATASET]
            .iter()
            .map(|p| ctx.ws.path(p))
            .filter(|p| p.exists())
            .collect();
        if found.is_empty() {
            return Err(CliError::usage("no dataset: pass --dataset or run seed-label / distant build first"));
        }
        found
    } else {
        for p in &datasets {
            existing(p)?;
        }
        datasets
    };
    let _lock = ctx.ws.lock()?;
    let mut examples = Vec::new();
    for p in &datasets {
        examples.extend(load_qa_dataset(p)?);
    }
    let docs = contexts_as_corpus(&examples)?;
    let masked = prepare_corpus(&docs, &ctx.ws.gazetteer()?);
    let b = &ctx.config.bootstrap;
    let (model, report) = train_with_report(&examples, &masked, b.hyper)?;
    let model = model.with_threshold(b.threshold)?;
    let path = ctx.ws.path(FINAL_MODEL);
    save_model(&model, &path)?;
    let roles: Vec<&str> = model.trained_roles().map(|r| r.as_str()).collect();
    Ok(format!(
        "examples: {}\ninstances: {} ({} positive)\nloss: {:.4} -> {:.4}\nroles: {}\nmodel: {}\n",
        examples.len(),
        report.instances,
        report.positives,
        report.initial_loss,
        report.final_loss,
        roles.join(", "),
        path.display()
    ))
}

pub fn extract(
    ctx: &Ctx,
    input_path: &Path,
    out: &Path,
    products_from: Option<&Path>,
    model: Option<PathBuf>,
) -> Result<String, CliError> {
    existing(input_path)?;
    if let Some(p) = products_from {
        existing(p)?;
    }
    let model_path = model.unwrap_or_else(|| ctx.ws.path(FINAL_MODEL));
    if !model_path.exists() {
        return Err(CliError::new(
            "UntrainedRole",
            Exit::State,
            format!("UntrainedRole: no trained model at {}; run `train` first", model_path.display()),
        ));
    }
    let model = load_model(&model_path)?;
    let docs = load_corpus(input_path)?;
    let gazetteer = ctx.ws.gazetteer()?;
    let given = match products_from {
        Some(p) => Some(products_by_doc(&read_reactions(p)?)),
        None => None,
    };
    let mut result = Vec::with_capacity(docs.len());
    for doc in &docs {
        let masked = prepare(doc, &gazetteer);
        let reactions = match &given {
            Some(map) => extract_with_products(&model, &masked, map.get(&doc.id).map_or(&[][..], Vec::as_slice))?,
            None => extract_all(&model, &masked)?,
        };
        result.push(DocReactions { doc_id: doc.id.clone(), reactions });
    }
    write_reactions(out, &result)?;
    let n: usize = result.iter().map(|d| d.reactions.len()).sum();
    Ok(format!("{} documents, {n} reactions -> {}\n", result.len(), out.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalTask {
    Products,
    Roles,
}

pub fn eval(
    task: EvalTask,
    pred: &Path,
    gold: Option<PathBuf>,
    conditioning: Conditioning,
    json: Option<&Path>,
    config: &AppConfig,
) -> Result<(String, EvalReport), CliError> {
    let gold = input(gold, &config.paths.gold, "gold")?;
    let pred = read_reactions(existing(pred)?)?;
    let gold = read_reactions(&gold)?;
    let report = match task {
        EvalTask::Products => evaluate_products(&products_by_doc(&pred), &products_by_doc(&gold)),
        EvalTask::Roles => evaluate_roles(&pred, &gold, conditioning),
    };
    if let Some(p) = json {
        write_atomic(p, pretty(&report).as_bytes())?;
    }
    Ok((report.to_table(), report))
}

#[derive(Debug, Serialize)]
struct AcceptedPattern<'a> {
    role: &'a str,
    pattern: &'a str,
    frequency: usize,
    precision_proxy: f64,
}

#[derive(Debug, Serialize)]
struct IterationReport<'a> {
    #[serde(flatten)]
    summary: &'a bootstrap::IterationSummary,
    model_path: &'a str,
    accepted: Vec<AcceptedPattern<'a>>,
}

pub fn report(ctx: &Ctx, iteration: u32) -> Result<String, CliError> {
    let service = ReviewService::new(ctx.ws.clone());
    let state = ctx.ws.state()?;
    let it = state.iteration(iteration)?;
    let summaries = service.list_iterations()?;
    let summary = summaries
        .iter()
        .find(|s| s.iteration == iteration)
        .ok_or(bootstrap::BootstrapError::UnknownIteration(iteration))?;
    let candidates = service.list_candidates(iteration, None)?;
    let mut accepted: Vec<AcceptedPattern<'_>> = candidates
        .iter()
        .filter(|c| c.status == Status::Accepted)
        .map(|c| AcceptedPattern {
            role: c.role.as_str(),
            pattern: &c.pattern,
            frequency: c.frequency,
            precision_proxy: c.precision_proxy,
        })
        .collect();
    accepted.sort_by(|a, b| (a.role, a.pattern).cmp(&(b.role, b.pattern)));
    Ok(pretty(&IterationReport { summary, model_path: &it.model_path, accepted }))
}
