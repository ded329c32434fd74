//! Occurrence indexing: finds every place a defined term or notation shows
//! up in the source, so the renderer can anchor a tooltip there.
//!
//! Rules:
//! - labels match case-sensitively on word boundaries, outside math and
//!   comments;
//! - notations match as whitespace-normalized substrings inside math;
//! - only snippets at or after the defining snippet are indexed; earlier
//!   hits are reported as pre-definition warnings;
//! - overlapping candidates resolve longest-match-first, ties to the
//!   earlier span, then to the smaller URI.

use alloc::string::String;
use alloc::vec::Vec;

use crate::kgraph::{normalize_notation, Entity, KnowledgeGraph, Uri};
use crate::latex::{scan_regions, RegionKind, SourceDocument};

/// Which form of the entity matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchForm {
    Label,
    Notation,
}

/// One anchored occurrence. The span is a byte range into the snippet body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub entity: Uri,
    pub snippet_id: u64,
    pub span: (usize, usize),
    pub form: MatchForm,
}

/// A match before the entity's defining snippet; reported, not anchored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreDefinitionUse {
    pub entity: Uri,
    pub snippet_id: u64,
    pub span: (usize, usize),
    pub defined_in: u64,
}

/// Output of [`index_occurrences`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OccurrenceIndex {
    pub occurrences: Vec<Occurrence>,
    pub warnings: Vec<PreDefinitionUse>,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Candidate entities: plain items (scope items have synthetic labels) that
/// carry provenance, i.e. were introduced by some snippet.
fn candidates(graph: &KnowledgeGraph) -> Vec<(Uri, String, Option<String>, u64)> {
    let mut out = Vec::new();
    for (uri, entity) in graph.entities() {
        if let Entity::Item(item) = entity {
            if let Some(defined_in) = item.provenance {
                out.push((
                    uri.clone(),
                    item.label.clone(),
                    item.notation.as_ref().map(|n| normalize_notation(n)),
                    defined_in,
                ));
            }
        }
    }
    out
}

/// Label matches on word boundaries within one text region.
fn label_matches(body: &str, region: (usize, usize), label: &str, out: &mut Vec<(usize, usize)>) {
    if label.is_empty() {
        return;
    }
    let slice = &body[region.0..region.1];
    let mut from = 0usize;
    while let Some(pos) = slice[from..].find(label) {
        let start = region.0 + from + pos;
        let end = start + label.len();
        let before_ok = body[..start].chars().next_back().is_none_or(|c| !is_word_char(c));
        let after_ok = body[end..].chars().next().is_none_or(|c| !is_word_char(c));
        if before_ok && after_ok {
            out.push((start, end));
        }
        from += pos + label.chars().next().map_or(1, char::len_utf8);
    }
}

/// Notation matches inside one math region, whitespace-insensitively. The
/// returned spans cover the original (unnormalized) bytes.
fn notation_matches(
    body: &str,
    inner: (usize, usize),
    normalized_notation: &str,
    out: &mut Vec<(usize, usize)>,
) {
    if normalized_notation.is_empty() {
        return;
    }
    let slice = &body[inner.0..inner.1];
    // Map each normalized char back to its byte offset in the body.
    let mut normalized = String::with_capacity(slice.len());
    let mut offsets: Vec<usize> = Vec::with_capacity(slice.len());
    for (idx, c) in slice.char_indices() {
        if !c.is_whitespace() {
            normalized.push(c);
            offsets.push(inner.0 + idx);
        }
    }
    let needle_chars = normalized_notation.chars().count();
    let mut from = 0usize;
    while let Some(pos) = normalized[from..].find(normalized_notation) {
        let char_start = normalized[..from + pos].chars().count();
        let start = offsets[char_start];
        let last = offsets[char_start + needle_chars - 1];
        let last_len = body[last..].chars().next().map_or(1, char::len_utf8);
        out.push((start, last + last_len));
        from += pos + normalized_notation[..].chars().next().map_or(1, char::len_utf8);
    }
}

/// Indexes all occurrences of defined entities over the document's snippets.
pub fn index_occurrences(doc: &SourceDocument, graph: &KnowledgeGraph) -> OccurrenceIndex {
    let candidates = candidates(graph);
    let mut index = OccurrenceIndex::default();

    for snippet in &doc.snippets {
        let (regions, _) = scan_regions(&snippet.body);
        // (start, end, uri, form, defined_in)
        let mut hits: Vec<(usize, usize, Uri, MatchForm, u64)> = Vec::new();
        for (uri, label, notation, defined_in) in &candidates {
            let mut spans: Vec<(usize, usize)> = Vec::new();
            for region in &regions {
                match region.kind {
                    RegionKind::Text => {
                        label_matches(&snippet.body, region.span, label, &mut spans)
                    }
                    RegionKind::MathInline | RegionKind::MathDisplay => {
                        if let Some(n) = notation {
                            let before = spans.len();
                            notation_matches(&snippet.body, region.inner, n, &mut spans);
                            for span in &mut spans[before..] {
                                hits.push((span.0, span.1, uri.clone(), MatchForm::Notation, *defined_in));
                            }
                            spans.truncate(before);
                        }
                    }
                    RegionKind::Comment => {}
                }
            }
            for (start, end) in spans {
                hits.push((start, end, uri.clone(), MatchForm::Label, *defined_in));
            }
        }

        // Pre-definition hits never compete for spans; they are warnings.
        let (eligible, early): (Vec<_>, Vec<_>) =
            hits.into_iter().partition(|(_, _, _, _, d)| snippet.id >= *d);
        for (start, end, uri, _, defined_in) in early {
            index.warnings.push(PreDefinitionUse {
                entity: uri,
                snippet_id: snippet.id,
                span: (start, end),
                defined_in,
            });
        }

        // Longest match first, ties by earlier start, then smaller URI.
        let mut eligible = eligible;
        eligible.sort_by(|a, b| {
            let len_a = a.1 - a.0;
            let len_b = b.1 - b.0;
            len_b
                .cmp(&len_a)
                .then(a.0.cmp(&b.0))
                .then(a.2.cmp(&b.2))
        });
        let mut taken: Vec<(usize, usize)> = Vec::new();
        let mut selected: Vec<(usize, usize, Uri, MatchForm)> = Vec::new();
        for (start, end, uri, form, _) in eligible {
            let overlaps = taken.iter().any(|&(s, e)| start < e && s < end);
            if !overlaps {
                taken.push((start, end));
                selected.push((start, end, uri, form));
            }
        }
        selected.sort_by_key(|(start, _, _, _)| *start);
        for (start, end, uri, form) in selected {
            index.occurrences.push(Occurrence {
                entity: uri,
                snippet_id: snippet.id,
                span: (start, end),
                form,
            });
        }
    }
    index.warnings.sort_by_key(|w| (w.snippet_id, w.span.0));
    index
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latex::split_document;

    fn graph_with(items: &[(&str, Option<&str>, u64)]) -> KnowledgeGraph {
        let mut g = KnowledgeGraph::new();
        for (label, notation, snippet) in items {
            let uri = g.create_item(label, None, *notation).unwrap();
            g.set_item_provenance(&uri, *snippet).unwrap();
        }
        g
    }

    #[test]
    fn counts_match_across_snippets_from_definition_on() {
        let text = "% !snippet 1\nnothing here.\n% !snippet 2\na basis appears.\n% !snippet 3\nbasis and basis again.\n% !snippet 4\nno mention.\n% !snippet 5\none more basis.\n";
        let doc = split_document(text, "x").unwrap();
        let g = graph_with(&[("basis", None, 2)]);
        let index = index_occurrences(&doc, &g);
        assert_eq!(index.occurrences.len(), 4, "snippets 2,3,3,5");
        assert!(index.warnings.is_empty());
        let ids: Vec<u64> = index.occurrences.iter().map(|o| o.snippet_id).collect();
        assert_eq!(ids, [2, 3, 3, 5]);
        for o in &index.occurrences {
            let snippet = doc.snippet(o.snippet_id).unwrap();
            assert_eq!(&snippet.body[o.span.0..o.span.1], "basis");
        }
    }

    #[test]
    fn pre_definition_use_is_a_warning_not_an_occurrence() {
        let text = "% !snippet 1\nearly basis use.\n% !snippet 2\nthe basis definition.\n";
        let doc = split_document(text, "x").unwrap();
        let g = graph_with(&[("basis", None, 2)]);
        let index = index_occurrences(&doc, &g);
        assert_eq!(index.occurrences.len(), 1);
        assert_eq!(index.occurrences[0].snippet_id, 2);
        assert_eq!(index.warnings.len(), 1);
        assert_eq!(index.warnings[0].snippet_id, 1);
        assert_eq!(index.warnings[0].defined_in, 2);
    }

    #[test]
    fn word_boundaries_respected() {
        let text = "% !snippet 1\nthe state of a statement is stateless.\n";
        let doc = split_document(text, "x").unwrap();
        let g = graph_with(&[("state", None, 1)]);
        let index = index_occurrences(&doc, &g);
        assert_eq!(index.occurrences.len(), 1, "only the bare word matches");
        let o = &index.occurrences[0];
        assert_eq!(&doc.snippets[0].body[o.span.0..o.span.1], "state");
    }

    #[test]
    fn labels_do_not_match_inside_math_and_notation_not_outside() {
        let text = "% !snippet 1\nthe norm $\\|u\\|$ and the word norm in text.\n";
        let doc = split_document(text, "x").unwrap();
        let g = graph_with(&[("norm", Some("\\|u\\|"), 1)]);
        let index = index_occurrences(&doc, &g);
        // two label hits outside math, one notation hit inside.
        assert_eq!(index.occurrences.len(), 3);
        let forms: Vec<MatchForm> = index.occurrences.iter().map(|o| o.form).collect();
        assert_eq!(forms, [MatchForm::Label, MatchForm::Notation, MatchForm::Label]);
    }

    #[test]
    fn notation_matches_whitespace_insensitively() {
        let text = "% !snippet 1\nwe write $\\langle u , v \\rangle = 0$ here.\n";
        let doc = split_document(text, "x").unwrap();
        let g = graph_with(&[("inner product", Some("\\langle u, v \\rangle"), 1)]);
        let index = index_occurrences(&doc, &g);
        assert_eq!(index.occurrences.len(), 1);
        let o = &index.occurrences[0];
        assert_eq!(o.form, MatchForm::Notation);
        assert_eq!(
            &doc.snippets[0].body[o.span.0..o.span.1],
            "\\langle u , v \\rangle"
        );
    }

    #[test]
    fn longest_match_wins_overlaps() {
        let text = "% !snippet 1\nevery inner product space has an inner product.\n";
        let doc = split_document(text, "x").unwrap();
        let g = graph_with(&[("inner product", None, 1), ("inner product space", None, 1)]);
        let index = index_occurrences(&doc, &g);
        assert_eq!(index.occurrences.len(), 2);
        let texts: Vec<&str> = index
            .occurrences
            .iter()
            .map(|o| &doc.snippets[0].body[o.span.0..o.span.1])
            .collect();
        assert_eq!(texts, ["inner product space", "inner product"]);
        // Spans never overlap.
        let mut spans: Vec<(usize, usize)> = index.occurrences.iter().map(|o| o.span).collect();
        spans.sort_unstable();
        for pair in spans.windows(2) {
            assert!(pair[0].1 <= pair[1].0);
        }
    }

    #[test]
    fn multibyte_labels_and_text_are_matched_safely() {
        let text = "% !snippet 1\nder M\u{f6}bius band\u{2014}the M\u{f6}bius band again\u{2026} plus $\\tau_\u{3b5}$.\n";
        let doc = split_document(text, "x").unwrap();
        let g = graph_with(&[("M\u{f6}bius band", Some("\\tau_\u{3b5}"), 1)]);
        let index = index_occurrences(&doc, &g);
        assert_eq!(index.occurrences.len(), 3, "{:?}", index.occurrences);
        for o in &index.occurrences {
            // Spans sit on char boundaries and carve out the matched form.
            let slice = &doc.snippets[0].body[o.span.0..o.span.1];
            match o.form {
                MatchForm::Label => assert_eq!(slice, "M\u{f6}bius band"),
                MatchForm::Notation => assert_eq!(slice, "\\tau_\u{3b5}"),
            }
        }
    }

    #[test]
    fn items_without_provenance_are_not_indexed() {
        let text = "% !snippet 1\na basis here.\n";
        let doc = split_document(text, "x").unwrap();
        let mut g = KnowledgeGraph::new();
        g.create_item("basis", None, None).unwrap();
        let index = index_occurrences(&doc, &g);
        assert!(index.occurrences.is_empty());
        assert!(index.warnings.is_empty());
    }
}
