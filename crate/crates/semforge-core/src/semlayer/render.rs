//! Final document assembly: HTML page with the hover tooltip layer.
//!
//! Every occurrence is wrapped in `<span class="sem-anchor">` holding the
//! matched text plus a `<div class="tooltip">` with the explanation; the
//! embedded stylesheet keeps tooltips hidden until hover. The layer is
//! purely additive: rendering with an empty occurrence list produces the
//! same document minus the anchors, byte for byte.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::html::{escape_html, latex_to_html};
use super::occur::Occurrence;
use super::tooltip::TooltipSpec;
use crate::kgraph::{KnowledgeGraph, Uri};
use crate::latex::SourceDocument;

/// Hover stylesheet embedded into every rendered document.
pub const DEFAULT_STYLESHEET: &str = "body { font-family: Georgia, 'Times New Roman', serif; max-width: 46rem; margin: 2rem auto; padding: 0 1rem; line-height: 1.55; color: #1c1c1c; }\nh1, h2, h3, h4 { font-family: 'Helvetica Neue', Arial, sans-serif; line-height: 1.2; }\nsection.snippet { margin-bottom: 0.25rem; }\n.sem-anchor { position: relative; border-bottom: 1px dotted #3a6ea5; cursor: help; }\n.sem-anchor .tooltip { display: none; position: absolute; left: 0; top: 1.5em; z-index: 10; width: 22rem; max-width: 80vw; background: #fffdf5; border: 1px solid #c8b87a; border-radius: 4px; padding: 0.6rem 0.8rem; font-size: 0.85rem; line-height: 1.4; box-shadow: 0 2px 8px rgba(0,0,0,0.25); }\n.sem-anchor:hover .tooltip { display: block; }\n.tooltip .tooltip-title { font-weight: bold; }\n.tooltip .tooltip-kind { color: #555; font-style: italic; margin-left: 0.4rem; }\n.tooltip p { margin: 0.35rem 0 0 0; }\n.tooltip .tooltip-source { display: block; margin-top: 0.4rem; color: #777; font-size: 0.78rem; }\n";

/// The assembled page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedDocument {
    pub html: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RenderError {
    DanglingOccurrence { entity: Uri, snippet_id: u64 },
    MissingTooltip { entity: Uri },
    Unbalanced { snippet_id: u64, message: String },
    ReservedCharacter { snippet_id: u64 },
}

impl fmt::Display for RenderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RenderError::DanglingOccurrence { entity, snippet_id } => {
                write!(f, "occurrence of {entity} points at unknown snippet {snippet_id}")
            }
            RenderError::MissingTooltip { entity } => {
                write!(f, "occurrence of {entity} has no tooltip content")
            }
            RenderError::Unbalanced { snippet_id, message } => {
                write!(f, "snippet {snippet_id}: {message}")
            }
            RenderError::ReservedCharacter { snippet_id } => {
                write!(
                    f,
                    "snippet {snippet_id} contains reserved private-use characters"
                )
            }
        }
    }
}

impl core::error::Error for RenderError {}

// Private-use sentinels around occurrence spans; they survive conversion
// untouched and are replaced by anchor markup afterwards.
const MARK_OPEN_START: char = '\u{F8F0}';
const MARK_OPEN_END: char = '\u{F8F1}';
const MARK_CLOSE_START: char = '\u{F8F2}';
const MARK_CLOSE_END: char = '\u{F8F3}';

fn open_marker(idx: usize) -> String {
    format!("{MARK_OPEN_START}{idx}{MARK_OPEN_END}")
}

fn close_marker(idx: usize) -> String {
    format!("{MARK_CLOSE_START}{idx}{MARK_CLOSE_END}")
}

fn tooltip_markup(spec: &TooltipSpec) -> String {
    let mut out = String::from("<div class=\"tooltip\">");
    out.push_str("<span class=\"tooltip-title\">");
    out.push_str(&escape_html(&spec.title));
    out.push_str("</span>");
    out.push_str("<span class=\"tooltip-kind\">");
    out.push_str(&escape_html(&spec.kind));
    out.push_str("</span>");
    out.push_str("<p class=\"tooltip-body\">");
    out.push_str(&escape_html(&spec.body));
    out.push_str("</p>");
    if let Some(notation) = &spec.notation {
        out.push_str("<p class=\"tooltip-notation\">Notation: <span class=\"math inline\">\\(");
        out.push_str(&escape_html(notation));
        out.push_str("\\)</span></p>");
    }
    if let Some(refined) = &spec.refined_body {
        out.push_str("<p class=\"tooltip-refined\">");
        out.push_str(&escape_html(refined));
        out.push_str("</p>");
    }
    out.push_str("<span class=\"tooltip-source\">Introduced in snippet ");
    out.push_str(&spec.source.to_string());
    out.push_str("</span>");
    out.push_str("</div>");
    out
}

/// Renders the document with the semantic layer.
///
/// `occurrences` must reference snippets of `doc` and entities of `graph`;
/// each occurrence entity needs an entry in `tooltips`. The output is one
/// self-contained HTML page; `title` is the page title.
pub fn render(
    doc: &SourceDocument,
    graph: &KnowledgeGraph,
    occurrences: &[Occurrence],
    tooltips: &BTreeMap<Uri, TooltipSpec>,
    stylesheet: &str,
    title: &str,
) -> Result<RenderedDocument, RenderError> {
    let mut warnings = Vec::new();

    let mut by_snippet: BTreeMap<u64, Vec<(usize, &Occurrence)>> = BTreeMap::new();
    for (idx, occurrence) in occurrences.iter().enumerate() {
        if graph.entity(&occurrence.entity).is_none() {
            return Err(RenderError::DanglingOccurrence {
                entity: occurrence.entity.clone(),
                snippet_id: occurrence.snippet_id,
            });
        }
        if doc.snippet(occurrence.snippet_id).is_none() {
            return Err(RenderError::DanglingOccurrence {
                entity: occurrence.entity.clone(),
                snippet_id: occurrence.snippet_id,
            });
        }
        if !tooltips.contains_key(&occurrence.entity) {
            return Err(RenderError::MissingTooltip {
                entity: occurrence.entity.clone(),
            });
        }
        by_snippet
            .entry(occurrence.snippet_id)
            .or_default()
            .push((idx, occurrence));
    }

    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>");
    out.push_str(&escape_html(title));
    out.push_str("</title>\n<style>\n");
    out.push_str(stylesheet);
    out.push_str("</style>\n</head>\n<body>\n<main class=\"document\">\n");

    if !doc.preamble.trim().is_empty() {
        let fragment = latex_to_html(&doc.preamble).map_err(|e| RenderError::Unbalanced {
            snippet_id: 0,
            message: e.to_string(),
        })?;
        for w in fragment.warnings {
            warnings.push(format!("preamble: {w}"));
        }
        if !fragment.html.is_empty() {
            out.push_str("<header class=\"preamble\">\n");
            out.push_str(&fragment.html);
            out.push_str("</header>\n");
        }
    }

    for snippet in &doc.snippets {
        let marked = match by_snippet.get(&snippet.id) {
            Some(list) => {
                if snippet.body.chars().any(|c| {
                    matches!(
                        c,
                        MARK_OPEN_START | MARK_OPEN_END | MARK_CLOSE_START | MARK_CLOSE_END
                    )
                }) {
                    return Err(RenderError::ReservedCharacter {
                        snippet_id: snippet.id,
                    });
                }
                let mut body = snippet.body.clone();
                // Inject from the back so earlier spans stay valid.
                let mut ordered: Vec<&(usize, &Occurrence)> = list.iter().collect();
                ordered.sort_by_key(|(_, o)| core::cmp::Reverse(o.span.0));
                for (idx, occurrence) in ordered {
                    let (start, end) = occurrence.span;
                    if end > body.len() || start >= end {
                        return Err(RenderError::DanglingOccurrence {
                            entity: occurrence.entity.clone(),
                            snippet_id: snippet.id,
                        });
                    }
                    body.insert_str(end, &close_marker(*idx));
                    body.insert_str(start, &open_marker(*idx));
                }
                body
            }
            None => snippet.body.clone(),
        };

        let fragment = latex_to_html(&marked).map_err(|e| RenderError::Unbalanced {
            snippet_id: snippet.id,
            message: e.to_string(),
        })?;
        for w in fragment.warnings {
            warnings.push(format!("snippet {}: {w}", snippet.id));
        }

        let mut html = fragment.html;
        if let Some(list) = by_snippet.get(&snippet.id) {
            for (idx, occurrence) in list {
                let open = open_marker(*idx);
                let close = close_marker(*idx);
                if !html.contains(&open) || !html.contains(&close) {
                    return Err(RenderError::DanglingOccurrence {
                        entity: occurrence.entity.clone(),
                        snippet_id: snippet.id,
                    });
                }
                let spec = &tooltips[&occurrence.entity];
                html = html.replacen(&open, "<span class=\"sem-anchor\">", 1);
                let closing = format!("{}</span>", tooltip_markup(spec));
                html = html.replacen(&close, &closing, 1);
            }
        }

        out.push_str(&format!("<section class=\"snippet\" id=\"snippet-{}\">\n", snippet.id));
        out.push_str(&html);
        out.push_str("</section>\n");
    }

    out.push_str("</main>\n</body>\n</html>\n");
    Ok(RenderedDocument {
        html: out,
        warnings,
    })
}
