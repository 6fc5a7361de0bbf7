//! Command-line front end for rxnmine workspaces.
//!
//! Every stage of the pipeline is a subcommand over one workspace
//! directory. Effective settings come from the compiled-in defaults, then
//! `--config FILE`, then `--set key=value`, then dedicated flags.
//!
//! Exit codes: 0 ok, 2 usage, 3 data error, 4 state error. Failures print a
//! single JSON line `{"error": code, "detail": text}` on stderr.

pub mod commands;
pub mod config;
pub mod error;
pub mod server;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rxnmine::bootstrap::{ReviewMode, ReviewService, Workspace};
use rxnmine::pipeline::Conditioning;

use crate::commands::{Ctx, EvalTask};
use crate::config::AppConfig;
use crate::error::{CliError, Exit};

#[derive(Debug, Parser)]
#[command(name = "rxnmine", version, about = "Weakly supervised chemical reaction extraction")]
pub struct Cli {
    /// Workspace directory [default: config `workspace`, else `.`]
    #[arg(long, short = 'w', global = true, value_name = "DIR")]
    pub workspace: Option<PathBuf>,
    /// Flat key = value config file
    #[arg(long, short = 'c', global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Override one config key; repeatable
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a corpus and store it in the workspace
    Ingest {
        /// Corpus JSONL with {id, text, source} per line
        #[arg(long, value_name = "FILE")]
        corpus: Option<PathBuf>,
        /// Chemical name list, one per line, replacing the built-in one
        #[arg(long, value_name = "FILE")]
        gazetteer: Option<PathBuf>,
    },
    /// Install seed patterns as version 0 and write weak labels and QA examples
    SeedLabel {
        /// Pattern file (role<TAB>pattern) [default: the built-in seeds]
        #[arg(long, value_name = "FILE")]
        seeds: Option<PathBuf>,
    },
    /// Patent-record supervision
    Distant {
        #[command(subcommand)]
        command: DistantCommand,
    },
    /// The pattern enrichment loop
    Bootstrap {
        #[command(subcommand)]
        command: BootstrapCommand,
    },
    /// Human review of mined candidates
    Review {
        #[command(subcommand)]
        command: ReviewCommand,
    },
    /// Train the extractor on QA datasets and save models/final.json
    Train {
        /// QA dataset JSONL; repeatable [default: the workspace datasets]
        #[arg(long = "dataset", value_name = "FILE")]
        datasets: Vec<PathBuf>,
    },
    /// Extract structured reactions from a corpus file
    Extract {
        /// Corpus JSONL to extract from
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Reactions JSONL to write
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Reactions JSONL whose products condition role extraction
        #[arg(long, value_name = "FILE")]
        products_from: Option<PathBuf>,
        /// Model file [default: models/final.json in the workspace]
        #[arg(long, value_name = "FILE")]
        model: Option<PathBuf>,
    },
    /// Score predicted reactions against gold reactions
    Eval {
        #[arg(value_enum)]
        task: EvalKind,
        /// Predicted reactions JSONL
        #[arg(long, value_name = "FILE")]
        pred: PathBuf,
        /// Gold reactions JSONL [default: config `gold`]
        #[arg(long, value_name = "FILE")]
        gold: Option<PathBuf>,
        /// How the predictions' products were obtained (roles only)
        #[arg(long, value_enum, default_value_t = ConditioningArg::Gold)]
        conditioning: ConditioningArg,
        /// Also write the report as JSON
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
    /// Summary of one bootstrap iteration as JSON
    Report {
        #[arg(long, value_name = "K")]
        iteration: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum DistantCommand {
    /// Filter patent records and write their QA examples
    Build {
        /// Patent records JSONL
        #[arg(long, value_name = "FILE")]
        patents: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum BootstrapCommand {
    /// Run iterations until the configured number are finalized
    Run {
        /// Decide candidates automatically instead of queueing them for review
        #[arg(long)]
        auto: bool,
        /// Number of iterations [default: config `iterations`]
        #[arg(long, value_name = "N")]
        iterations: Option<u32>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReviewCommand {
    /// Serve the review API and console
    Serve {
        #[arg(long, default_value_t = 8787)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory with the console bundle
        #[arg(long, value_name = "DIR")]
        assets: Option<PathBuf>,
    },
    /// Merge an iteration's accepted candidates once every candidate is decided
    Finalize {
        #[arg(long, value_name = "K")]
        iteration: u32,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EvalKind {
    Products,
    Roles,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConditioningArg {
    Gold,
    Predicted,
}

fn context(cli: &Cli) -> Result<Ctx, CliError> {
    let mut config = match &cli.config {
        Some(p) => AppConfig::load(p)?,
        None => AppConfig::default(),
    };
    for pair in &cli.set {
        config.set_override(pair)?;
    }
    if let Some(w) = &cli.workspace {
        config.paths.workspace = Some(w.clone());
    }
    if let Command::Bootstrap { command: BootstrapCommand::Run { auto, iterations } } = &cli.command {
        if *auto {
            config.bootstrap.review_mode = ReviewMode::Auto;
        }
        if let Some(n) = iterations {
            config.bootstrap.iterations = *n;
        }
    }
    config.validate()?;
    let ws = Workspace::open(config.paths.workspace.clone().unwrap_or_else(|| PathBuf::from(".")));
    Ok(Ctx { config, ws })
}

fn serve(ctx: &Ctx, host: &str, port: u16, assets: Option<PathBuf>) -> Result<String, CliError> {
    if let Some(dir) = &assets {
        if !dir.is_dir() {
            return Err(CliError::missing_file(dir));
        }
    }
    let _lock = ctx.ws.lock()?;
    let app = server::router(ReviewService::new(ctx.ws.clone()), ctx.config.clone(), assets);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port)).await?;
        println!("serving {} on http://{}", ctx.ws.root().display(), listener.local_addr()?);
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
    })?;
    Ok(String::new())
}

/// Runs one parsed command and returns its stdout text.
pub fn execute(cli: Cli) -> Result<String, CliError> {
    let ctx = context(&cli)?;
    match cli.command {
        Command::Ingest { corpus, gazetteer } => commands::ingest(&ctx, corpus, gazetteer),
        Command::SeedLabel { seeds } => commands::seed_label(&ctx, seeds),
        Command::Distant { command: DistantCommand::Build { patents } } => commands::distant_build(&ctx, patents),
        Command::Bootstrap { command: BootstrapCommand::Run { .. } } => commands::bootstrap_run(&ctx),
        Command::Review { command: ReviewCommand::Serve { port, host, assets } } => serve(&ctx, &host, port, assets),
        Command::Review { command: ReviewCommand::Finalize { iteration } } => commands::review_finalize(&ctx, iteration),
        Command::Train { datasets } => commands::train(&ctx, datasets),
        Command::Extract { input, out, products_from, model } => {
            commands::extract(&ctx, &input, &out, products_from.as_deref(), model)
        }
        Command::Eval { task, pred, gold, conditioning, json } => {
            let task = match task {
                EvalKind::Products => EvalTask::Products,
                EvalKind::Roles => EvalTask::Roles,
            };
            let conditioning = match conditioning {
                ConditioningArg::Gold => Conditioning::GoldProducts,
                ConditioningArg::Predicted => Conditioning::Predicted,
            };
            commands::eval(task, &pred, gold, conditioning, json.as_deref(), &ctx.config).map(|(table, _)| table)
        }
        Command::Report { iteration } => commands::report(&ctx, iteration),
    }
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Usage as i32 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(out) => {
            print!("{out}");
            let _ = std::io::stdout().flush();
            0
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit as i32
        }
    }
}
