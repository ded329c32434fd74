//! FNL: the controlled subject-predicate-object language produced by the
//! LLM, reviewed by humans and compiled into the knowledge graph.
//!
//! File format (`.fnl`): UTF-8, markdown-like. `#` lines are comments except
//! `## snippet <id>` block headers; statements are `- subject predicate:
//! object` bullets indented two spaces per nesting level; quoted strings
//! introduce new terms; `$...$` carries math; scope keywords (`setup:`,
//! `premise:`, `assertion:`) structure theorem compounds.

mod ast;
mod diff;
mod emit;
mod lint;
mod parse;
mod vocab;

pub use ast::{FnlDocument, FnlStatement, StatementBody, Term};
pub use diff::{diff_summary, DiffSummary};
pub use emit::{line_content, serialize_block, serialize_fnl, term_text};
pub use lint::lint;
pub use parse::{codes, parse_fnl, Diagnostic, ParseOutcome, Severity};
pub use vocab::{ObjectKind, PredicateVocabulary, VocabError};
