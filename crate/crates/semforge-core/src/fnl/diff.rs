//! Document-level diff used to measure how much of the extracted FNL a
//! reviewer had to touch.
//!
//! Statements are compared by canonical text within their block and nesting
//! context. A removed and an added statement that share block, context,
//! subject and predicate count as one modification; everything else counts
//! as an addition or removal. The intervention rate is
//! `(added + removed + modified) / max(1, statements in old)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::{FnlDocument, FnlStatement, StatementBody};
use super::emit::{line_content, term_text};

/// Summary of a review pass.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffSummary {
    pub added: usize,
    pub removed: usize,
    pub modified: usize,
    pub intervention_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    /// block id + nesting context + canonical content.
    exact: String,
    /// block id + nesting context + subject + predicate, for pairing
    /// modifications; `None` for scope lines.
    slot: Option<String>,
    matched: bool,
}

fn flatten(doc: &FnlDocument) -> Vec<Entry> {
    let mut out = Vec::new();
    for (block, statements) in &doc.blocks {
        let mut context = String::new();
        for stmt in statements {
            flatten_into(stmt, *block, &mut context, &mut out);
        }
    }
    out
}

fn flatten_into(stmt: &FnlStatement, block: u64, context: &mut String, out: &mut Vec<Entry>) {
    let content = line_content(&stmt.body);
    let slot = match &stmt.body {
        StatementBody::Spo {
            subject, predicate, ..
        } => Some(format!(
            "{block}\u{1f}{context}\u{1f}{}\u{1f}{predicate}",
            term_text(subject)
        )),
        StatementBody::Scope(_) => None,
    };
    out.push(Entry {
        exact: format!("{block}\u{1f}{context}\u{1f}{content}"),
        slot,
        matched: false,
    });
    let saved = context.len();
    context.push_str(&content);
    context.push('\u{1e}');
    for child in &stmt.children {
        flatten_into(child, block, context, out);
    }
    context.truncate(saved);
}

/// Compares two documents and reports review effort.
pub fn diff_summary(old: &FnlDocument, new: &FnlDocument) -> DiffSummary {
    let mut old_entries = flatten(old);
    let mut new_entries = flatten(new);
    let old_total = old_entries.len();

    // Pass 1: exact matches are untouched statements.
    for o in old_entries.iter_mut() {
        if let Some(n) = new_entries
            .iter_mut()
            .find(|n| !n.matched && n.exact == o.exact)
        {
            o.matched = true;
            n.matched = true;
        }
    }

    // Pass 2: same slot (block, context, subject, predicate) but different
    // text is a modification.
    let mut modified = 0usize;
    for o in old_entries.iter_mut().filter(|o| !o.matched) {
        let Some(slot) = &o.slot else { continue };
        if let Some(n) = new_entries
            .iter_mut()
            .find(|n| !n.matched && n.slot.as_ref() == Some(slot))
        {
            o.matched = true;
            n.matched = true;
            modified += 1;
        }
    }

    let removed = old_entries.iter().filter(|e| !e.matched).count();
    let added = new_entries.iter().filter(|e| !e.matched).count();
    let intervention_rate = (added + removed + modified) as f64 / old_total.max(1) as f64;
    DiffSummary {
        added,
        removed,
        modified,
        intervention_rate,
    }
}
