//! Canonical FNL serialization.
//!
//! Canonical form: two-space indent per depth, `- ` bullets, single spaces
//! between tokens, `## snippet <id>` headers for every block except the
//! implicit block 0, one blank line between blocks. Parsing canonical text
//! and serializing again is byte-identity.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::{FnlDocument, FnlStatement, StatementBody, Term};

/// Canonical text of a term.
pub fn term_text(term: &Term) -> String {
    match term {
        Term::Reference(id) => id.clone(),
        Term::NewTerm(s) => crate::textenc::quote(s),
        Term::Math(m) => {
            let mut out = String::with_capacity(m.len() + 2);
            out.push('$');
            out.push_str(m);
            out.push('$');
            out
        }
        Term::Literal(l) => match l {
            crate::kgraph::Literal::Str(s) => crate::textenc::quote(s),
            crate::kgraph::Literal::Int(n) => n.to_string(),
            crate::kgraph::Literal::Dec(d) => d.clone(),
        },
    }
}

/// Canonical content of one line, without indentation or bullet.
pub fn line_content(body: &StatementBody) -> String {
    match body {
        StatementBody::Spo {
            subject,
            predicate,
            object,
        } => {
            let mut out = term_text(subject);
            out.push(' ');
            out.push_str(predicate);
            out.push(':');
            out.push(' ');
            out.push_str(&term_text(object));
            out
        }
        StatementBody::Scope(kind) => {
            let mut out = String::from(kind.as_str());
            out.push(':');
            out
        }
    }
}

fn emit_statement(stmt: &FnlStatement, depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
    out.push_str("- ");
    out.push_str(&line_content(&stmt.body));
    out.push('\n');
    for child in &stmt.children {
        emit_statement(child, depth + 1, out);
    }
}

/// Serializes a list of statements (one block body, no header).
pub fn serialize_block(statements: &[FnlStatement]) -> String {
    let mut out = String::new();
    for stmt in statements {
        emit_statement(stmt, 0, &mut out);
    }
    out
}

/// Serializes a whole document in canonical form.
pub fn serialize_fnl(doc: &FnlDocument) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (id, statements) in &doc.blocks {
        let mut part = String::new();
        if *id != 0 {
            part.push_str("## snippet ");
            part.push_str(&id.to_string());
            part.push('\n');
        }
        part.push_str(&serialize_block(statements));
        parts.push(part);
    }
    parts.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnl::parse::parse_fnl;
    use crate::fnl::vocab::PredicateVocabulary;

    #[test]
    fn empty_document_serializes_to_empty_text() {
        assert_eq!(serialize_fnl(&FnlDocument::default()), "");
    }

    #[test]
    fn canonical_text_is_a_fixed_point() {
        let vocab = PredicateVocabulary::default_set();
        let canonical = "## snippet 2\n- \"vector space\" is_a: \"mathematical concept\"\n- vector_space has_description: \"a set of vectors\"\n\n## snippet 3\n- \"thm\" is_a: theorem\n  - premise:\n    - x is_a: vector_space\n  - assertion:\n    - x has_notation: $\\mathbb{V}$\n";
        let outcome = parse_fnl(canonical, &vocab);
        assert!(outcome.is_clean(), "{:?}", outcome.diagnostics);
        let emitted = serialize_fnl(&outcome.document);
        assert_eq!(emitted, canonical);
        // parse(serialize(doc)) == doc
        let reparsed = parse_fnl(&emitted, &vocab);
        assert!(reparsed.is_clean());
        assert_eq!(reparsed.document, outcome.document);
    }

    #[test]
    fn nested_depths_indent_by_two() {
        let vocab = PredicateVocabulary::default_set();
        let text = "- \"a\" is_a: \"b\"\n  - setup:\n    - c is_a: a\n";
        let outcome = parse_fnl(text, &vocab);
        assert!(outcome.is_clean());
        let emitted = serialize_fnl(&outcome.document);
        let lines: Vec<&str> = emitted.lines().collect();
        assert!(lines[0].starts_with("- "));
        assert!(lines[1].starts_with("  - "));
        assert!(lines[2].starts_with("    - "));
    }

    #[test]
    fn non_canonical_spacing_normalizes() {
        let vocab = PredicateVocabulary::default_set();
        let text = "- x is_a:   y\n";
        let outcome = parse_fnl(text, &vocab);
        assert!(outcome.is_clean());
        assert_eq!(serialize_fnl(&outcome.document), "- x is_a: y\n");
    }
}
