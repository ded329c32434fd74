//! FNL linting: review-support checks that run between extraction and
//! compilation. All findings are warnings; the linter never mutates its
//! inputs.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::{FnlDocument, FnlStatement, StatementBody, Term};
use super::emit::line_content;
use super::parse::{codes, Diagnostic};
use super::vocab::PredicateVocabulary;
use crate::kgraph::{normalize_label, KnowledgeGraph};

/// Lints a parsed document against the vocabulary and an existing graph.
///
/// Checks:
/// - references that match no graph label and were not introduced as a new
///   term earlier in the document;
/// - byte-identical duplicate statements (same block, same nesting context);
/// - scope keywords outside a theorem-introducing statement;
/// - scope sections without statements.
pub fn lint(
    doc: &FnlDocument,
    _vocab: &PredicateVocabulary,
    graph: &KnowledgeGraph,
) -> Vec<Diagnostic> {
    let mut diagnostics = Vec::new();
    let mut introduced: BTreeSet<String> = BTreeSet::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();

    for (block_id, statements) in &doc.blocks {
        let mut context = String::new();
        for stmt in statements {
            walk(
                stmt,
                *block_id,
                &mut context,
                false,
                graph,
                &mut introduced,
                &mut seen,
                &mut diagnostics,
            );
        }
    }
    diagnostics.sort_by_key(|d| (d.line, d.column));
    diagnostics
}

#[allow(clippy::too_many_arguments)]
fn walk(
    stmt: &FnlStatement,
    block: u64,
    context: &mut String,
    parent_is_spo: bool,
    graph: &KnowledgeGraph,
    introduced: &mut BTreeSet<String>,
    seen: &mut BTreeSet<String>,
    diagnostics: &mut Vec<Diagnostic>,
) {
    let content = line_content(&stmt.body);
    let key = format!("{block}\u{1f}{context}\u{1f}{content}");
    if !seen.insert(key) {
        diagnostics.push(Diagnostic::warning(
            stmt.source_line,
            1,
            codes::DUPLICATE_STATEMENT,
            format!("statement duplicates an earlier identical line: {content}"),
        ));
    }

    match &stmt.body {
        StatementBody::Scope(kind) => {
            if !parent_is_spo {
                diagnostics.push(Diagnostic::warning(
                    stmt.source_line,
                    1,
                    codes::SCOPE_OUTSIDE_THEOREM,
                    format!("{kind} scope is not nested under a theorem-introducing statement"),
                ));
            }
            if stmt.children.is_empty() {
                diagnostics.push(Diagnostic::warning(
                    stmt.source_line,
                    1,
                    codes::EMPTY_SCOPE,
                    format!("{kind} scope has no statements"),
                ));
            }
        }
        StatementBody::Spo {
            subject, object, ..
        } => {
            check_term(subject, stmt.source_line, graph, introduced, diagnostics);
            check_term(object, stmt.source_line, graph, introduced, diagnostics);
        }
    }

    let is_spo = !stmt.is_scope();
    let saved = context.len();
    context.push_str(&content);
    context.push('\u{1e}');
    for child in &stmt.children {
        walk(child, block, context, is_spo, graph, introduced, seen, diagnostics);
    }
    context.truncate(saved);
}

fn check_term(
    term: &Term,
    line: usize,
    graph: &KnowledgeGraph,
    introduced: &mut BTreeSet<String>,
    diagnostics: &mut Vec<Diagnostic>,
) {
    match term {
        Term::NewTerm(label) => {
            introduced.insert(normalize_label(label));
        }
        Term::Reference(ident) => {
            let known = introduced.contains(ident)
                || graph.item_by_label(ident).is_some()
                || graph.items_by_normalized_label(ident).len() == 1;
            if !known {
                diagnostics.push(Diagnostic::warning(
                    line,
                    1,
                    codes::UNRESOLVED_REFERENCE,
                    format!(
                        "{ident:?} matches no graph label and is not introduced earlier in the document"
                    ),
                ));
            }
        }
        Term::Math(_) | Term::Literal(_) => {}
    }
}
