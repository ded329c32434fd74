//! Pipeline stages behind the CLI subcommands.
//!
//! Stages communicate through files under the output directory only, so a
//! human can review and edit the extracted FNL between `extract` and
//! `compile`, and running the stages individually is byte-equivalent to one
//! `pipeline` run:
//!
//! ```text
//! out/
//!   fnl/snippet_XXX.fnl     extraction output, the review surface
//!   fnl/snippet_XXX.raw.txt unparseable responses, kept for review
//!   graph.kgt               compiled graph
//!   graph.kgb               builder-script export
//!   doc.html                rendered document with the semantic layer
//!   reports/                per-stage plain-text reports
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use semforge_core::compiler::{self, CompileError};
use semforge_core::fnl::{self, FnlDocument, PredicateVocabulary, Severity};
use semforge_core::kgraph::{self, KnowledgeGraph, Literal, Node, TriplePattern};
use semforge_core::latex::{self, SourceDocument};
use semforge_core::prompt::{self, PromptTemplate};
use semforge_core::semlayer::{self, TooltipSpec};
use semforge_core::Uri;

use crate::config::{parse_vocabulary, PipelineConfig};
use crate::llm::{CachedRefiner, ExtractError, LlmClient};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Split(#[from] latex::SplitError),
    #[error("template: {0}")]
    Template(#[from] prompt::TemplateError),
    #[error("vocabulary: {0}")]
    Vocabulary(String),
    #[error("{0}")]
    Assemble(#[from] prompt::AssembleError),
    #[error("{0}")]
    Extract(#[from] ExtractError),
    #[error("{path}: {source}")]
    FnlFile {
        path: String,
        source: std::io::Error,
    },
    #[error("{count} error diagnostics in FNL input; review before compiling")]
    LintGate { count: usize },
    #[error("graph file: {0}")]
    GraphText(#[from] kgraph::TextParseError),
    #[error("graph: {0}")]
    Graph(#[from] kgraph::GraphError),
    #[error("compile: {0}")]
    Compile(#[from] CompileError),
    #[error("render: {0}")]
    Render(#[from] semlayer::RenderError),
    #[error("no compiled graph at {0}; run compile first")]
    MissingGraph(String),
    #[error("query pattern: {0}")]
    BadPattern(String),
    #[error("unknown snippet {0}")]
    UnknownSnippet(u64),
}

/// Loaded, validated working set for one run.
pub struct Workspace {
    pub config: PipelineConfig,
    pub template: PromptTemplate,
    pub vocab: PredicateVocabulary,
    pub source: SourceDocument,
}

impl Workspace {
    pub fn load(config: PipelineConfig) -> Result<Self, PipelineError> {
        let template = PromptTemplate::parse(&config.template_text()?)?;
        let vocab =
            parse_vocabulary(&config.vocabulary_text()?).map_err(PipelineError::Vocabulary)?;
        let text = fs::read_to_string(&config.source)?;
        let origin = config
            .source
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "source.tex".to_string());
        let source = latex::split_document(&text, &origin)?;
        Ok(Workspace {
            config,
            template,
            vocab,
            source,
        })
    }

    pub fn fnl_dir(&self) -> PathBuf {
        self.config.output_dir.join("fnl")
    }

    pub fn reports_dir(&self) -> PathBuf {
        self.config.output_dir.join("reports")
    }

    pub fn graph_path(&self) -> PathBuf {
        self.config.output_dir.join("graph.kgt")
    }

    pub fn script_path(&self) -> PathBuf {
        self.config.output_dir.join("graph.kgb")
    }

    pub fn html_path(&self) -> PathBuf {
        self.config.output_dir.join("doc.html")
    }

    fn fnl_file(&self, id: u64) -> PathBuf {
        self.fnl_dir().join(format!("snippet_{id:03}.fnl"))
    }

    fn raw_file(&self, id: u64) -> PathBuf {
        self.fnl_dir().join(format!("snippet_{id:03}.raw.txt"))
    }

    fn write_report(&self, name: &str, content: &str) -> Result<(), PipelineError> {
        let dir = self.reports_dir();
        fs::create_dir_all(&dir)?;
        fs::write(dir.join(name), content)?;
        Ok(())
    }
}

// ----- split -----

/// Validates snippeting and reports the snippet table.
pub fn run_split(ws: &Workspace) -> Result<String, PipelineError> {
    let mut out = String::new();
    writeln!(out, "source: {}", ws.source.origin).unwrap();
    writeln!(out, "snippets: {}", ws.source.snippets.len()).unwrap();
    for s in &ws.source.snippets {
        writeln!(
            out,
            "snippet {:>3}  lines {:>4}-{:<4}  ~{} sentences",
            s.id, s.line_range.0, s.line_range.1, s.sentence_estimate
        )
        .unwrap();
    }
    for w in latex::validate_snippets(&ws.source) {
        writeln!(out, "warning: {w}").unwrap();
    }
    Ok(out)
}

// ----- extract -----

/// Per-snippet outcome of an extraction run.
#[derive(Debug)]
pub struct ExtractSummary {
    pub accepted: Vec<u64>,
    pub failed: Vec<u64>,
}

/// Loads every accepted FNL block currently in the output directory.
pub fn load_accepted_fnl(
    ws: &Workspace,
) -> Result<(FnlDocument, Vec<fnl::Diagnostic>), PipelineError> {
    let mut merged = FnlDocument::default();
    let mut diagnostics = Vec::new();
    let dir = ws.fnl_dir();
    if !dir.is_dir() {
        return Ok((merged, diagnostics));
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "fnl"))
        .collect();
    paths.sort();
    for path in paths {
        let text = fs::read_to_string(&path).map_err(|source| PipelineError::FnlFile {
            path: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
            source,
        })?;
        let outcome = fnl::parse_fnl(&text, &ws.vocab);
        diagnostics.extend(outcome.diagnostics);
        for (id, statements) in outcome.document.blocks {
            // Later files win on id collisions; ids are file-named so this
            // only triggers on hand-edited inputs.
            merged.set_block(id, statements);
        }
    }
    Ok((merged, diagnostics))
}

/// Extracts FNL for the snippets in `[from, to]` (defaults: whole document),
/// chaining each prompt on the accepted statements of earlier snippets.
pub fn run_extract(
    ws: &Workspace,
    client: &LlmClient,
    from: Option<u64>,
    to: Option<u64>,
) -> Result<ExtractSummary, PipelineError> {
    fs::create_dir_all(ws.fnl_dir())?;
    let (mut accepted, _) = load_accepted_fnl(ws)?;
    let mut summary = ExtractSummary {
        accepted: Vec::new(),
        failed: Vec::new(),
    };
    let mut report = String::from("extraction report\n");
    let mut failures: Vec<(u64, Vec<fnl::Diagnostic>)> = Vec::new();

    for snippet in &ws.source.snippets {
        let id = snippet.id;
        if from.is_some_and(|f| id < f) || to.is_some_and(|t| id > t) {
            continue;
        }
        let bundle = prompt::assemble_prompt(
            &ws.template,
            &ws.vocab,
            &ws.source,
            &accepted,
            id,
            ws.config.prompt_budget,
            &ws.config.model,
        )?;
        match crate::llm::extract_snippet_fnl(client, &bundle, &ws.vocab, ws.config.mode) {
            Ok(statements) => {
                let mut block_doc = FnlDocument::default();
                block_doc.set_block(id, statements.clone());
                fs::write(ws.fnl_file(id), fnl::serialize_fnl(&block_doc))?;
                let _ = fs::remove_file(ws.raw_file(id));
                writeln!(report, "snippet {id}: ok ({} statements)", block_doc.statement_count())
                    .unwrap();
                accepted.set_block(id, statements);
                summary.accepted.push(id);
            }
            Err(ExtractError::Unparseable { raw, diagnostics }) => {
                fs::write(ws.raw_file(id), &raw)?;
                let _ = fs::remove_file(ws.fnl_file(id));
                writeln!(report, "snippet {id}: FAILED ({} diagnostics), raw response kept", diagnostics.len())
                    .unwrap();
                for d in &diagnostics {
                    writeln!(report, "  {d}").unwrap();
                }
                failures.push((id, diagnostics));
                summary.failed.push(id);
            }
            Err(other) => return Err(other.into()),
        }
    }
    writeln!(
        report,
        "accepted: {}, failed: {}",
        summary.accepted.len(),
        summary.failed.len()
    )
    .unwrap();
    ws.write_report("extract.txt", &report)?;
    Ok(summary)
}

// ----- lint -----

/// Result of linting everything under `out/fnl`.
pub struct LintOutcome {
    pub diagnostics: Vec<fnl::Diagnostic>,
    pub document: FnlDocument,
    pub report: String,
}

impl LintOutcome {
    pub fn error_count(&self) -> usize {
        self.diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Error)
            .count()
    }
}

/// Parses and lints the extracted (possibly reviewed) FNL files.
pub fn run_lint(ws: &Workspace) -> Result<LintOutcome, PipelineError> {
    let (document, mut diagnostics) = load_accepted_fnl(ws)?;
    let graph = KnowledgeGraph::with_namespace(&ws.config.namespace)?;
    diagnostics.extend(fnl::lint(&document, &ws.vocab, &graph));

    let mut report = String::from("lint report\n");
    for d in &diagnostics {
        writeln!(report, "{d}").unwrap();
    }
    let errors = diagnostics
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .count();
    let warnings = diagnostics.len() - errors;
    writeln!(report, "errors: {errors}, warnings: {warnings}").unwrap();
    ws.write_report("lint.txt", &report)?;
    Ok(LintOutcome {
        diagnostics,
        document,
        report,
    })
}

// ----- compile -----

/// Compiles the reviewed FNL into a graph, writing `graph.kgt`, `graph.kgb`
/// and the compile report. `base` extends an existing graph file.
pub fn run_compile(
    ws: &Workspace,
    base: Option<&Path>,
) -> Result<compiler::CompileReport, PipelineError> {
    let lint = run_lint(ws)?;
    if lint.error_count() > 0 {
        return Err(PipelineError::LintGate {
            count: lint.error_count(),
        });
    }
    let mut graph = match base {
        Some(path) => kgraph::parse(&fs::read_to_string(path)?)?,
        None => KnowledgeGraph::with_namespace(&ws.config.namespace)?,
    };
    let report = compiler::compile(&lint.document, &mut graph)?;

    fs::create_dir_all(&ws.config.output_dir)?;
    fs::write(ws.graph_path(), kgraph::serialize(&graph))?;
    fs::write(ws.script_path(), kgraph::export_builder_script(&graph))?;

    let mut text = String::from("compile report\n");
    writeln!(text, "items created: {}", report.created_items.len()).unwrap();
    writeln!(text, "relations created: {}", report.created_relations.len()).unwrap();
    writeln!(text, "scope items created: {}", report.created_scope_items.len()).unwrap();
    writeln!(text, "statements asserted: {}", report.asserted_statements.len()).unwrap();
    for w in &report.warnings {
        writeln!(text, "warning: {w}").unwrap();
    }
    ws.write_report("compile.txt", &text)?;
    Ok(report)
}

// ----- render -----

/// Renders the final HTML document with the semantic layer.
pub fn run_render(
    ws: &Workspace,
    client: Option<&LlmClient>,
    stylesheet: Option<&str>,
) -> Result<semlayer::RenderedDocument, PipelineError> {
    let graph_path = ws.graph_path();
    if !graph_path.is_file() {
        return Err(PipelineError::MissingGraph(
            graph_path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        ));
    }
    let graph = kgraph::parse(&fs::read_to_string(&graph_path)?)?;
    let index = semlayer::index_occurrences(&ws.source, &graph);

    let refiner = client.filter(|_| ws.config.refine_tooltips).map(|client| CachedRefiner {
        client,
        model: ws.config.model.clone(),
        mode: ws.config.mode,
    });

    let mut entities: Vec<Uri> = index.occurrences.iter().map(|o| o.entity.clone()).collect();
    entities.sort();
    entities.dedup();

    let mut tooltips: BTreeMap<Uri, TooltipSpec> = BTreeMap::new();
    let mut tooltip_warnings: Vec<String> = Vec::new();
    for entity in &entities {
        let (spec, warnings) = semlayer::generate_tooltip_content(
            entity,
            &graph,
            refiner.as_ref().map(|r| r as &dyn semlayer::TooltipRefiner),
        )?;
        tooltip_warnings.extend(warnings);
        tooltips.insert(entity.clone(), spec);
    }

    let rendered = semlayer::render(
        &ws.source,
        &graph,
        &index.occurrences,
        &tooltips,
        stylesheet.unwrap_or(semlayer::DEFAULT_STYLESHEET),
        &ws.source.origin,
    )?;
    fs::create_dir_all(&ws.config.output_dir)?;
    fs::write(ws.html_path(), &rendered.html)?;

    let mut report = String::from("render report\n");
    writeln!(report, "occurrences: {}", index.occurrences.len()).unwrap();
    writeln!(report, "tooltip entities: {}", entities.len()).unwrap();
    for w in &index.warnings {
        writeln!(
            report,
            "pre-definition use: {} in snippet {} (defined in snippet {})",
            w.entity, w.snippet_id, w.defined_in
        )
        .unwrap();
    }
    for w in &tooltip_warnings {
        writeln!(report, "warning: {w}").unwrap();
    }
    for w in &rendered.warnings {
        writeln!(report, "warning: {w}").unwrap();
    }
    ws.write_report("render.txt", &report)?;
    Ok(rendered)
}

// ----- prompt / diff / query -----

/// Assembles and returns the prompt for one snippet, chaining on whatever
/// FNL is already accepted in the output directory.
pub fn run_prompt(ws: &Workspace, snippet: u64) -> Result<String, PipelineError> {
    if ws.source.snippet(snippet).is_none() {
        return Err(PipelineError::UnknownSnippet(snippet));
    }
    let (accepted, _) = load_accepted_fnl(ws)?;
    let bundle = prompt::assemble_prompt(
        &ws.template,
        &ws.vocab,
        &ws.source,
        &accepted,
        snippet,
        ws.config.prompt_budget,
        &ws.config.model,
    )?;
    Ok(bundle.text)
}

/// Loads FNL from a file or a directory of `.fnl` files.
pub fn load_fnl_path(
    path: &Path,
    vocab: &PredicateVocabulary,
) -> Result<FnlDocument, PipelineError> {
    let mut merged = FnlDocument::default();
    let mut texts: Vec<(String, String)> = Vec::new();
    if path.is_dir() {
        let mut paths: Vec<PathBuf> = fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "fnl"))
            .collect();
        paths.sort();
        for p in paths {
            texts.push((
                p.file_name().unwrap_or_default().to_string_lossy().into_owned(),
                fs::read_to_string(&p)?,
            ));
        }
    } else {
        texts.push((
            path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
            fs::read_to_string(path)?,
        ));
    }
    for (name, text) in texts {
        let outcome = fnl::parse_fnl(&text, vocab);
        if !outcome.is_clean() {
            return Err(PipelineError::BadPattern(format!(
                "{name} has {} parse errors",
                outcome
                    .diagnostics
                    .iter()
                    .filter(|d| d.severity == Severity::Error)
                    .count()
            )));
        }
        for (id, statements) in outcome.document.blocks {
            merged.set_block(id, statements);
        }
    }
    Ok(merged)
}

/// Intervention metric between two FNL files or directories.
pub fn run_diff(
    old: &Path,
    new: &Path,
    vocab: &PredicateVocabulary,
) -> Result<fnl::DiffSummary, PipelineError> {
    let old_doc = load_fnl_path(old, vocab)?;
    let new_doc = load_fnl_path(new, vocab)?;
    Ok(fnl::diff_summary(&old_doc, &new_doc))
}

/// Parses a `"S P O"` pattern with `?` wildcards against the graph. Terms
/// are URIs, `lit:` literals or labels.
pub fn parse_pattern(graph: &KnowledgeGraph, pattern: &str) -> Result<TriplePattern, PipelineError> {
    let tokens: Vec<&str> = pattern.split_whitespace().collect();
    if tokens.len() != 3 {
        return Err(PipelineError::BadPattern(format!(
            "expected three whitespace-separated terms, found {}",
            tokens.len()
        )));
    }
    let entity_term = |token: &str, relation_position: bool| -> Result<Option<Uri>, PipelineError> {
        if token == "?" {
            return Ok(None);
        }
        if token.starts_with("kb://") {
            return token
                .parse::<Uri>()
                .map(Some)
                .map_err(|e| PipelineError::BadPattern(format!("{token}: {e}")));
        }
        let found = if relation_position {
            graph.relation_by_label(token).cloned()
        } else {
            graph.item_by_label(token).cloned().or_else(|| {
                match graph.items_by_normalized_label(token) {
                    [single] => Some(single.clone()),
                    _ => None,
                }
            })
        };
        found
            .map(Some)
            .ok_or_else(|| PipelineError::BadPattern(format!("unknown label {token:?}")))
    };

    let subject = entity_term(tokens[0], false)?;
    let predicate = entity_term(tokens[1], true)?;
    let object = if tokens[2] == "?" {
        None
    } else if tokens[2].starts_with("lit:") {
        Some(Node::Literal(Literal::decode(tokens[2]).ok_or_else(
            || PipelineError::BadPattern(format!("malformed literal {:?}", tokens[2])),
        )?))
    } else {
        entity_term(tokens[2], false)?.map(Node::Entity)
    };

    Ok(TriplePattern {
        subject,
        predicate,
        object,
    })
}

/// One statement per line in the graph text format.
pub fn format_statements(statements: &[kgraph::Statement]) -> String {
    let mut out = String::new();
    for st in statements {
        out.push_str(&format!("S\t{}\t{}\t{}\t", st.uri, st.subject, st.predicate));
        match &st.object {
            Node::Entity(u) => out.push_str(&u.to_string()),
            Node::Literal(l) => out.push_str(&l.encode()),
        }
        if let Some(scope) = &st.scope {
            out.push_str(&format!("\tscope={scope}"));
        }
        out.push('\n');
    }
    out
}

/// Loads the compiled graph and runs a pattern query.
pub fn run_query(ws: &Workspace, pattern: &str) -> Result<String, PipelineError> {
    let graph_path = ws.graph_path();
    if !graph_path.is_file() {
        return Err(PipelineError::MissingGraph(
            graph_path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        ));
    }
    let graph = kgraph::parse(&fs::read_to_string(&graph_path)?)?;
    let pattern = parse_pattern(&graph, pattern)?;
    let hits = graph
        .query(&pattern)
        .map_err(|e| PipelineError::BadPattern(e.to_string()))?;
    Ok(format_statements(&hits))
}

// ----- pipeline -----

/// Full workflow: extract, lint gate, compile, render.
pub fn run_pipeline(
    ws: &Workspace,
    client: &LlmClient,
    stylesheet: Option<&str>,
) -> Result<(), PipelineError> {
    let summary = run_extract(ws, client, None, None)?;
    if !summary.failed.is_empty() {
        return Err(PipelineError::LintGate {
            count: summary.failed.len(),
        });
    }
    let lint = run_lint(ws)?;
    if lint.error_count() > 0 {
        return Err(PipelineError::LintGate {
            count: lint.error_count(),
        });
    }
    run_compile(ws, None)?;
    run_render(ws, Some(client), stylesheet)?;
    Ok(())
}
