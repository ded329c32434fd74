//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 when a stage fails or diagnostics are
//! treated as errors, 2 on usage or configuration problems.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{validate_config, PipelineConfig};
use crate::llm::{Cache, HttpTransport, LlmClient, Mode};
use crate::pipeline::{self, Workspace};

#[derive(Debug, Parser)]
#[command(
    name = "semforge",
    about = "Converts annotated LaTeX sources into a knowledge graph and a semantically annotated HTML document",
    version
)]
pub struct Cli {
    /// Configuration file.
    #[arg(long, global = true, default_value = "semforge.toml")]
    config: PathBuf,

    /// Override the configured LLM mode.
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<Mode>,

    /// Override the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::parse(s).ok_or_else(|| format!("{s:?} is not one of live, record, replay"))
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate snippet delimitation and print the snippet table.
    Split,
    /// Print the assembled LLM prompt for one snippet.
    Prompt {
        #[arg(long)]
        snippet: u64,
    },
    /// Extract FNL statements for a snippet range (default: all).
    Extract {
        #[arg(long)]
        from: Option<u64>,
        #[arg(long)]
        to: Option<u64>,
    },
    /// Parse and lint the extracted FNL files.
    Lint,
    /// Report the intervention metric between two FNL files or directories.
    Diff { old: PathBuf, new: PathBuf },
    /// Compile reviewed FNL into the knowledge graph.
    Compile {
        /// Extend an existing graph file instead of starting fresh.
        #[arg(long)]
        base: Option<PathBuf>,
    },
    /// Query the compiled graph with a "S P O" pattern (`?` = wildcard).
    Query { pattern: String },
    /// Render the document with the interactive semantic layer.
    Render {
        /// Replace the embedded stylesheet with this file.
        #[arg(long)]
        stylesheet: Option<PathBuf>,
    },
    /// Run extract, lint gate, compile and render in one go.
    Pipeline {
        #[arg(long)]
        stylesheet: Option<PathBuf>,
    },
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, ExitCode> {
    match validate_config(&cli.config) {
        Ok((mut config, warnings)) => {
            for w in warnings {
                eprintln!("semforge: {w}");
            }
            if let Some(mode) = cli.mode {
                config.mode = mode;
            }
            if let Some(out) = &cli.out {
                config.output_dir = out.clone();
            }
            Ok(config)
        }
        Err(issues) => {
            for issue in issues {
                eprintln!("semforge: {issue}");
            }
            Err(ExitCode::from(2))
        }
    }
}

fn make_client(config: &PipelineConfig) -> LlmClient {
    LlmClient::new(
        &config.endpoint,
        config.api_key.clone(),
        Cache::new(&config.cache_dir),
        Box::new(HttpTransport::new()),
    )
}

fn read_stylesheet(path: &Option<PathBuf>) -> Result<Option<String>, ExitCode> {
    match path {
        None => Ok(None),
        Some(p) => match std::fs::read_to_string(p) {
            Ok(text) => Ok(Some(text)),
            Err(e) => {
                eprintln!("semforge: cannot read stylesheet {}: {e}", p.display());
                Err(ExitCode::from(2))
            }
        },
    }
}

fn fail(e: pipeline::PipelineError) -> ExitCode {
    eprintln!("semforge: {e}");
    ExitCode::from(1)
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();

    // diff needs no source document; handle it before workspace loading.
    // Without a config file it falls back to the default vocabulary.
    if let Command::Diff { old, new } = &cli.command {
        let vocab = if cli.config.exists() {
            let config = match load_config(&cli) {
                Ok(config) => config,
                Err(code) => return code,
            };
            match config
                .vocabulary_text()
                .map_err(pipeline::PipelineError::Io)
                .and_then(|text| {
                    crate::config::parse_vocabulary(&text)
                        .map_err(pipeline::PipelineError::Vocabulary)
                }) {
                Ok(vocab) => vocab,
                Err(e) => return fail(e),
            }
        } else {
            semforge_core::fnl::PredicateVocabulary::default_set()
        };
        return match pipeline::run_diff(old, new, &vocab) {
            Ok(summary) => {
                println!(
                    "added: {}  removed: {}  modified: {}  intervention rate: {:.4}",
                    summary.added, summary.removed, summary.modified, summary.intervention_rate
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        };
    }

    let config = match load_config(&cli) {
        Ok(config) => config,
        Err(code) => return code,
    };
    let ws = match Workspace::load(config) {
        Ok(ws) => ws,
        Err(e) => return fail(e),
    };

    match &cli.command {
        Command::Split => match pipeline::run_split(&ws) {
            Ok(table) => {
                print!("{table}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Prompt { snippet } => match pipeline::run_prompt(&ws, *snippet) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Extract { from, to } => {
            let client = make_client(&ws.config);
            match pipeline::run_extract(&ws, &client, *from, *to) {
                Ok(summary) if summary.failed.is_empty() => {
                    println!("extracted {} snippets", summary.accepted.len());
                    ExitCode::SUCCESS
                }
                Ok(summary) => {
                    eprintln!(
                        "semforge: {} snippets failed to parse; raw responses kept for review",
                        summary.failed.len()
                    );
                    ExitCode::from(1)
                }
                Err(e) => fail(e),
            }
        }
        Command::Lint => match pipeline::run_lint(&ws) {
            Ok(outcome) => {
                print!("{}", outcome.report);
                if outcome.error_count() > 0 {
                    ExitCode::from(1)
                } else {
                    ExitCode::SUCCESS
                }
            }
            Err(e) => fail(e),
        },
        Command::Diff { .. } => unreachable!("handled above"),
        Command::Compile { base } => match pipeline::run_compile(&ws, base.as_deref()) {
            Ok(report) => {
                println!(
                    "compiled: {} items, {} scope items, {} statements",
                    report.created_items.len(),
                    report.created_scope_items.len(),
                    report.asserted_statements.len()
                );
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Query { pattern } => match pipeline::run_query(&ws, pattern) {
            Ok(lines) => {
                print!("{lines}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Render { stylesheet } => {
            let css = match read_stylesheet(stylesheet) {
                Ok(css) => css,
                Err(code) => return code,
            };
            let client = make_client(&ws.config);
            match pipeline::run_render(&ws, Some(&client), css.as_deref()) {
                Ok(rendered) => {
                    println!(
                        "rendered {} with {} warnings",
                        ws.html_path().display(),
                        rendered.warnings.len()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Pipeline { stylesheet } => {
            let css = match read_stylesheet(stylesheet) {
                Ok(css) => css,
                Err(code) => return code,
            };
            let client = make_client(&ws.config);
            match pipeline::run_pipeline(&ws, &client, css.as_deref()) {
                Ok(()) => {
                    println!("pipeline complete: {}", ws.config.output_dir.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
