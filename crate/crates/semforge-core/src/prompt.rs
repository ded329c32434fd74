//! Prompt template handling and deterministic assembly.
//!
//! A template is a markdown file split into exactly seven parts by `## `
//! headings:
//!
//! 1. vocabulary description (may carry `{{VOCABULARY}}`)
//! 2. remarks and instructions
//! 3. already-processed source slot (`{{PROCESSED_LATEX}}`)
//! 4. extracted-statements slot (`{{EXTRACTED_FNL}}`)
//! 5. current snippet slot (`{{CURRENT_SNIPPET}}`)
//! 6. following snippet slot (`{{FOLLOWING_SNIPPET}}`)
//! 7. final instructions
//!
//! Assembly fills the slots for one snippet. Only part 3 may be truncated
//! (from the front, marker-prefixed) to meet the character budget; parts 1,
//! 2, 4, 5, 6 and 7 are never cut. The bundle's content hash is the SHA-256
//! of model id and assembled text, so any single-character change to either
//! produces a different cache key.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use sha2::{Digest, Sha256};

use crate::fnl::{serialize_fnl, FnlDocument, PredicateVocabulary};
use crate::latex::{self, SourceDocument, TRUNCATION_MARKER};

pub const PART_COUNT: usize = 7;

pub const PLACEHOLDER_VOCABULARY: &str = "{{VOCABULARY}}";
pub const PLACEHOLDER_PROCESSED: &str = "{{PROCESSED_LATEX}}";
pub const PLACEHOLDER_FNL: &str = "{{EXTRACTED_FNL}}";
pub const PLACEHOLDER_CURRENT: &str = "{{CURRENT_SNIPPET}}";
pub const PLACEHOLDER_FOLLOWING: &str = "{{FOLLOWING_SNIPPET}}";

/// Fills the processed-source slot when nothing was processed yet.
pub const PROCESSED_EMPTY_MARKER: &str = "(nothing processed yet)";
/// Fills the extracted-statements slot when no statements exist yet.
pub const FNL_EMPTY_MARKER: &str = "(no statements extracted yet)";
/// Fills the following-snippet slot for the last snippet.
pub const FOLLOWING_NONE_MARKER: &str = "(none - this is the last snippet)";

/// A validated seven-part template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    parts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TemplateError {
    WrongPartCount(usize),
    ContentBeforeFirstPart,
    MissingPlaceholder { part: usize, placeholder: &'static str },
    RepeatedPlaceholder { part: usize, placeholder: &'static str },
}

impl fmt::Display for TemplateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateError::WrongPartCount(n) => {
                write!(f, "template must have exactly {PART_COUNT} '## ' parts, found {n}")
            }
            TemplateError::ContentBeforeFirstPart => {
                f.write_str("template has content before the first '## ' heading")
            }
            TemplateError::MissingPlaceholder { part, placeholder } => {
                write!(f, "part {part} must contain {placeholder}")
            }
            TemplateError::RepeatedPlaceholder { part, placeholder } => {
                write!(f, "part {part} contains {placeholder} more than once")
            }
        }
    }
}

impl core::error::Error for TemplateError {}

impl PromptTemplate {
    /// Splits template text into its seven parts and validates slot
    /// placeholders.
    pub fn parse(text: &str) -> Result<Self, TemplateError> {
        let mut parts: Vec<String> = Vec::new();
        let mut current: Option<String> = None;
        for line in text.lines() {
            if line.starts_with("## ") {
                if let Some(done) = current.take() {
                    parts.push(done);
                }
                current = Some(String::new());
            } else if current.is_none() && !line.trim().is_empty() {
                return Err(TemplateError::ContentBeforeFirstPart);
            }
            if let Some(part) = &mut current {
                part.push_str(line);
                part.push('\n');
            }
        }
        if let Some(done) = current.take() {
            parts.push(done);
        }
        if parts.len() != PART_COUNT {
            return Err(TemplateError::WrongPartCount(parts.len()));
        }
        for (idx, placeholder) in [
            (2, PLACEHOLDER_PROCESSED),
            (3, PLACEHOLDER_FNL),
            (4, PLACEHOLDER_CURRENT),
            (5, PLACEHOLDER_FOLLOWING),
        ] {
            let count = parts[idx].matches(placeholder).count();
            if count == 0 {
                return Err(TemplateError::MissingPlaceholder {
                    part: idx + 1,
                    placeholder,
                });
            }
            if count > 1 {
                return Err(TemplateError::RepeatedPlaceholder {
                    part: idx + 1,
                    placeholder,
                });
            }
        }
        Ok(PromptTemplate { parts })
    }

    pub fn parts(&self) -> &[String] {
        &self.parts
    }
}

/// An assembled prompt ready for the LLM client.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBundle {
    pub snippet_id: u64,
    pub model: String,
    pub text: String,
    /// Lowercase hex SHA-256 over model id and prompt text.
    pub content_hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssembleError {
    UnknownSnippet(u64),
    BudgetTooSmall { budget: usize, minimum: usize },
}

impl fmt::Display for AssembleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssembleError::UnknownSnippet(id) => write!(f, "unknown snippet {id}"),
            AssembleError::BudgetTooSmall { budget, minimum } => write!(
                f,
                "prompt budget of {budget} characters cannot fit the untruncatable parts ({minimum} characters)"
            ),
        }
    }
}

impl core::error::Error for AssembleError {}

/// Content hash of a (model, prompt text) pair.
pub fn content_hash(model: &str, text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(model.as_bytes());
    hasher.update(b"\n");
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        let hi = byte >> 4;
        let lo = byte & 0xf;
        for n in [hi, lo] {
            out.push(char::from_digit(n as u32, 16).expect("nibble"));
        }
    }
    out
}

/// Assembles the prompt for `snippet_id`.
///
/// Part 4 receives exactly the FNL accepted for snippets with a smaller id
/// (blocks `>= snippet_id` in `fnl_so_far` are ignored), so context chaining
/// is monotone by construction.
pub fn assemble_prompt(
    template: &PromptTemplate,
    vocab: &PredicateVocabulary,
    doc: &SourceDocument,
    fnl_so_far: &FnlDocument,
    snippet_id: u64,
    budget_chars: usize,
    model: &str,
) -> Result<PromptBundle, AssembleError> {
    // The context budget here only guards against pathological inputs; the
    // real cap is applied below against the whole assembled prompt.
    let context = latex::snippet_context(doc, snippet_id, usize::MAX)
        .map_err(|e| AssembleError::UnknownSnippet(e.0))?;

    let accepted = fnl_so_far.blocks_below(snippet_id);
    let fnl_text = if accepted.is_empty() {
        FNL_EMPTY_MARKER.to_string()
    } else {
        serialize_fnl(&accepted)
    };
    let following = match &context.following {
        Some(text) => text.clone(),
        None => FOLLOWING_NONE_MARKER.to_string(),
    };

    let render = |processed: &str| -> String {
        let mut out = String::new();
        for (idx, part) in template.parts.iter().enumerate() {
            let filled = match idx {
                0 => part.replace(PLACEHOLDER_VOCABULARY, &vocab.render_listing()),
                2 => part.replace(PLACEHOLDER_PROCESSED, processed),
                3 => part.replace(PLACEHOLDER_FNL, &fnl_text),
                4 => part.replace(PLACEHOLDER_CURRENT, &context.current),
                5 => part.replace(PLACEHOLDER_FOLLOWING, &following),
                _ => part.clone(),
            };
            out.push_str(&filled);
        }
        out
    };

    let processed_full = if context.processed.is_empty() {
        PROCESSED_EMPTY_MARKER.to_string()
    } else {
        context.processed.clone()
    };

    let text = {
        let full = render(&processed_full);
        if full.chars().count() <= budget_chars {
            full
        } else {
            // Re-render with an empty slot to size the fixed parts, then give
            // the remainder of the budget to the processed window.
            let base = render("").chars().count();
            let marker_len = TRUNCATION_MARKER.chars().count();
            let minimum = base + marker_len;
            if budget_chars < minimum {
                return Err(AssembleError::BudgetTooSmall {
                    budget: budget_chars,
                    minimum,
                });
            }
            let keep = budget_chars - minimum;
            let tail = latex::tail_chars(&context.processed, keep);
            let mut truncated = String::with_capacity(TRUNCATION_MARKER.len() + tail.len());
            truncated.push_str(TRUNCATION_MARKER);
            truncated.push_str(tail);
            render(&truncated)
        }
    };

    let content_hash = content_hash(model, &text);
    Ok(PromptBundle {
        snippet_id,
        model: model.to_string(),
        text,
        content_hash,
    })
}
