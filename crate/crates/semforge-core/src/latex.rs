//! Snippet delimitation over LaTeX sources.
//!
//! A source is subdivided by delimiter comments of the form
//! `% !snippet <id>` on their own line. Everything before the first
//! delimiter is the preamble; each delimiter opens a snippet that runs to
//! the next delimiter (or the end of input). Splitting is lossless:
//! preamble, delimiter lines and bodies concatenate back to the input
//! byte-exactly.
//!
//! The module also hosts the region scanner shared with the HTML converter
//! and the occurrence indexer: it classifies a body into text, inline math
//! (`$...$`, `\(...\)`), display math (`$$...$$`, `\[...\]`) and comment
//! regions.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// A delimiter-bounded region of the source; the unit of LLM processing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snippet {
    pub id: u64,
    /// The raw delimiter line (including its newline), kept verbatim so the
    /// document reassembles byte-exactly.
    pub delimiter: String,
    pub body: String,
    /// 1-based line span of the body in the original source.
    pub line_range: (usize, usize),
    pub sentence_estimate: usize,
}

/// A split source document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceDocument {
    pub origin: String,
    pub preamble: String,
    pub snippets: Vec<Snippet>,
}

impl SourceDocument {
    /// Reassembles the original input byte-exactly.
    pub fn join(&self) -> String {
        let mut out = String::from(&self.preamble);
        for s in &self.snippets {
            out.push_str(&s.delimiter);
            out.push_str(&s.body);
        }
        out
    }

    pub fn snippet(&self, id: u64) -> Option<&Snippet> {
        self.snippets.iter().find(|s| s.id == id)
    }
}

/// Errors raised while splitting a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitError {
    NoDelimiters,
    DuplicateSnippetId { id: u64, line: usize },
    NonMonotoneIds { id: u64, line: usize },
    EmptySnippet { id: u64, line: usize },
    BadDelimiter { line: usize },
}

impl fmt::Display for SplitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitError::NoDelimiters => f.write_str("no snippet delimiters found"),
            SplitError::DuplicateSnippetId { id, line } => {
                write!(f, "line {line}: duplicate snippet id {id}")
            }
            SplitError::NonMonotoneIds { id, line } => {
                write!(f, "line {line}: snippet id {id} is not strictly increasing")
            }
            SplitError::EmptySnippet { id, line } => {
                write!(f, "line {line}: snippet {id} has an empty body")
            }
            SplitError::BadDelimiter { line } => {
                write!(f, "line {line}: malformed snippet delimiter")
            }
        }
    }
}

impl core::error::Error for SplitError {}

/// Parses a delimiter line. Accepts `%`, optional spaces, `!snippet`,
/// spaces, digits; returns `Some(Err(..))` for lines that clearly try to be
/// delimiters but carry a bad id.
fn delimiter_id(line: &str) -> Option<Result<u64, ()>> {
    let trimmed = line.trim();
    let rest = trimmed.strip_prefix('%')?;
    let rest = rest.trim_start();
    let rest = rest.strip_prefix("!snippet")?;
    if !rest.starts_with(|c: char| c.is_whitespace()) {
        return Some(Err(()));
    }
    let digits = rest.trim();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Some(Err(()));
    }
    match digits.parse::<u64>() {
        Ok(id) if id > 0 => Some(Ok(id)),
        _ => Some(Err(())),
    }
}

/// Splits a source into preamble and snippets. The input must contain at
/// least one delimiter; ids must be strictly increasing and bodies nonempty
/// after trimming.
pub fn split_document(text: &str, origin: &str) -> Result<SourceDocument, SplitError> {
    // Collect raw lines including their terminators so reassembly is exact.
    let mut lines: Vec<&str> = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        match rest.find('\n') {
            Some(pos) => {
                lines.push(&rest[..=pos]);
                rest = &rest[pos + 1..];
            }
            None => {
                lines.push(rest);
                rest = "";
            }
        }
    }

    let mut preamble = String::new();
    let mut snippets: Vec<Snippet> = Vec::new();
    let mut current: Option<(u64, String, String, usize)> = None; // id, delimiter, body, body start line
    let mut last_id = 0u64;

    fn flush(
        current: &mut Option<(u64, String, String, usize)>,
        snippets: &mut Vec<Snippet>,
        end_line: usize,
    ) -> Result<(), SplitError> {
        if let Some((id, delimiter, body, start)) = current.take() {
            if body.trim().is_empty() {
                return Err(SplitError::EmptySnippet {
                    id,
                    line: start.saturating_sub(1),
                });
            }
            let estimate = sentence_estimate(&body);
            snippets.push(Snippet {
                id,
                delimiter,
                body,
                line_range: (start, end_line),
                sentence_estimate: estimate,
            });
        }
        Ok(())
    }

    for (idx, raw) in lines.iter().enumerate() {
        let line_no = idx + 1;
        match delimiter_id(raw) {
            Some(Ok(id)) => {
                flush(&mut current, &mut snippets, line_no.saturating_sub(1))?;
                if snippets.iter().any(|s| s.id == id) {
                    return Err(SplitError::DuplicateSnippetId { id, line: line_no });
                }
                if id <= last_id {
                    return Err(SplitError::NonMonotoneIds { id, line: line_no });
                }
                last_id = id;
                current = Some((id, raw.to_string(), String::new(), line_no + 1));
            }
            Some(Err(())) => return Err(SplitError::BadDelimiter { line: line_no }),
            None => match &mut current {
                Some((_, _, body, _)) => body.push_str(raw),
                None => preamble.push_str(raw),
            },
        }
    }
    flush(&mut current, &mut snippets, lines.len())?;

    if snippets.is_empty() {
        return Err(SplitError::NoDelimiters);
    }
    Ok(SourceDocument {
        origin: origin.to_string(),
        preamble,
        snippets,
    })
}

// ----- region scanning -----

/// Classification of a scanned region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RegionKind {
    Text,
    MathInline,
    MathDisplay,
    Comment,
}

/// A classified byte range. For math regions `inner` excludes the
/// delimiters; for text and comments it equals `span`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Region {
    pub kind: RegionKind,
    pub span: (usize, usize),
    pub inner: (usize, usize),
}

/// Scans a body into text/math/comment regions. The boolean is false when a
/// math region never closes (the region then extends to the end of input).
pub(crate) fn scan_regions(text: &str) -> (Vec<Region>, bool) {
    let bytes = text.as_bytes();
    let len = bytes.len();
    let mut regions = Vec::new();
    let mut balanced = true;
    let mut text_start = 0usize;
    let mut i = 0usize;

    fn push_text(regions: &mut Vec<Region>, from: usize, to: usize) {
        if from < to {
            regions.push(Region {
                kind: RegionKind::Text,
                span: (from, to),
                inner: (from, to),
            });
        }
    }

    while i < len {
        let b = bytes[i];
        if b == b'\\' && i + 1 < len {
            let next = bytes[i + 1];
            if next == b'(' || next == b'[' {
                push_text(&mut regions, text_start, i);
                let (closer, kind): (&[u8], RegionKind) = if next == b'(' {
                    (b"\\)", RegionKind::MathInline)
                } else {
                    (b"\\]", RegionKind::MathDisplay)
                };
                let inner_start = i + 2;
                let close = find_bytes(bytes, inner_start, closer);
                let (inner_end, span_end) = match close {
                    Some(pos) => (pos, pos + 2),
                    None => {
                        balanced = false;
                        (len, len)
                    }
                };
                regions.push(Region {
                    kind,
                    span: (i, span_end),
                    inner: (inner_start, inner_end),
                });
                i = span_end;
                text_start = i;
                continue;
            }
            i += 2; // escaped character, e.g. \$ or \%
            continue;
        }
        if b == b'$' {
            push_text(&mut regions, text_start, i);
            let display = i + 1 < len && bytes[i + 1] == b'$';
            let (open_len, kind) = if display {
                (2, RegionKind::MathDisplay)
            } else {
                (1, RegionKind::MathInline)
            };
            let inner_start = i + open_len;
            let close = find_dollar(bytes, inner_start, display);
            let (inner_end, span_end) = match close {
                Some(pos) => (pos, pos + open_len),
                None => {
                    balanced = false;
                    (len, len)
                }
            };
            regions.push(Region {
                kind,
                span: (i, span_end),
                inner: (inner_start, inner_end),
            });
            i = span_end;
            text_start = i;
            continue;
        }
        if b == b'%' {
            push_text(&mut regions, text_start, i);
            let end = find_newline(bytes, i).unwrap_or(len);
            regions.push(Region {
                kind: RegionKind::Comment,
                span: (i, end),
                inner: (i, end),
            });
            i = end;
            text_start = i;
            continue;
        }
        i += 1;
    }
    push_text(&mut regions, text_start, len);
    (regions, balanced)
}

/// Finds `needle` skipping backslash-escaped spans; the needle itself may
/// start with a backslash (math closers do).
fn find_bytes(haystack: &[u8], from: usize, needle: &[u8]) -> Option<usize> {
    if needle.is_empty() || from >= haystack.len() {
        return None;
    }
    let mut i = from;
    while i + needle.len() <= haystack.len() {
        if &haystack[i..i + needle.len()] == needle {
            return Some(i);
        }
        if haystack[i] == b'\\' {
            i += 2;
        } else {
            i += 1;
        }
    }
    None
}

fn find_newline(haystack: &[u8], from: usize) -> Option<usize> {
    haystack[from..].iter().position(|&b| b == b'\n').map(|p| from + p)
}

fn find_dollar(haystack: &[u8], from: usize, display: bool) -> Option<usize> {
    let mut i = from;
    while i < haystack.len() {
        match haystack[i] {
            b'\\' => i += 2,
            b'$' => {
                if display {
                    if i + 1 < haystack.len() && haystack[i + 1] == b'$' {
                        return Some(i);
                    }
                    i += 1;
                } else {
                    return Some(i);
                }
            }
            _ => i += 1,
        }
    }
    None
}

/// Crude sentence estimate: `.`, `!` or `?` followed by whitespace or end of
/// input, counted outside math and comments. Only used for warnings.
pub(crate) fn sentence_estimate(body: &str) -> usize {
    let (regions, _) = scan_regions(body);
    let bytes = body.as_bytes();
    let mut count = 0usize;
    for region in &regions {
        if region.kind != RegionKind::Text {
            continue;
        }
        for i in region.span.0..region.span.1 {
            let b = bytes[i];
            if b == b'.' || b == b'!' || b == b'?' {
                let terminal = match bytes.get(i + 1) {
                    None => true,
                    Some(n) => n.is_ascii_whitespace(),
                };
                if terminal {
                    count += 1;
                }
            }
        }
    }
    count
}

// ----- validation -----

/// Non-fatal findings about a snippet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SnippetWarning {
    TooLong { id: u64, sentences: usize },
    NoSentences { id: u64 },
    UnbalancedMath { id: u64 },
    UnbalancedEnvironment { id: u64, name: String },
}

impl fmt::Display for SnippetWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SnippetWarning::TooLong { id, sentences } => {
                write!(f, "snippet {id}: {sentences} sentences (expected one to five)")
            }
            SnippetWarning::NoSentences { id } => {
                write!(f, "snippet {id}: no sentence terminators found")
            }
            SnippetWarning::UnbalancedMath { id } => {
                write!(f, "snippet {id}: unbalanced math delimiters")
            }
            SnippetWarning::UnbalancedEnvironment { id, name } => {
                write!(f, "snippet {id}: unbalanced environment {name:?}")
            }
        }
    }
}

/// Warns about snippets that are too long or empty, unbalanced math and
/// unbalanced environments. Pure: never mutates the document.
pub fn validate_snippets(doc: &SourceDocument) -> Vec<SnippetWarning> {
    let mut warnings = Vec::new();
    for s in &doc.snippets {
        if s.sentence_estimate > 5 {
            warnings.push(SnippetWarning::TooLong {
                id: s.id,
                sentences: s.sentence_estimate,
            });
        } else if s.sentence_estimate == 0 {
            warnings.push(SnippetWarning::NoSentences { id: s.id });
        }
        let (regions, balanced) = scan_regions(&s.body);
        if !balanced {
            warnings.push(SnippetWarning::UnbalancedMath { id: s.id });
        }
        let mut stack: Vec<String> = Vec::new();
        for region in &regions {
            if region.kind != RegionKind::Text {
                continue;
            }
            let slice = &s.body[region.span.0..region.span.1];
            for (cmd, name) in environment_markers(slice) {
                // \begin{document}/\end{document} straddle the snippet
                // boundaries by design; skip them here.
                if name == "document" {
                    continue;
                }
                if cmd == "begin" {
                    stack.push(name);
                } else {
                    match stack.pop() {
                        Some(open) if open == name => {}
                        _ => {
                            warnings.push(SnippetWarning::UnbalancedEnvironment {
                                id: s.id,
                                name,
                            });
                        }
                    }
                }
            }
        }
        for name in stack {
            warnings.push(SnippetWarning::UnbalancedEnvironment { id: s.id, name });
        }
    }
    warnings
}

/// Yields `("begin"|"end", environment-name)` markers in document order.
fn environment_markers(text: &str) -> Vec<(&'static str, String)> {
    let mut found: Vec<(usize, &'static str, String)> = Vec::new();
    for (cmd, keyword) in [("begin", "\\begin{"), ("end", "\\end{")] {
        let mut start = 0usize;
        while let Some(pos) = text[start..].find(keyword) {
            let abs = start + pos;
            let after = &text[abs + keyword.len()..];
            if let Some(close) = after.find('}') {
                found.push((abs, cmd, after[..close].to_string()));
            }
            start = abs + keyword.len();
        }
    }
    found.sort_by_key(|(pos, _, _)| *pos);
    found.into_iter().map(|(_, cmd, name)| (cmd, name)).collect()
}

// ----- context windows -----

/// Marker prepended to the processed-source window when it was truncated to
/// fit the character budget.
pub const TRUNCATION_MARKER: &str = "[...earlier source truncated...]\n";

/// Context handed to prompt assembly for one snippet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextWindow {
    /// Concatenated bodies of all snippets before the current one, possibly
    /// front-truncated (see [`TRUNCATION_MARKER`]).
    pub processed: String,
    pub truncated: bool,
    pub current: String,
    pub following: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownSnippet(pub u64);

impl fmt::Display for UnknownSnippet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown snippet {}", self.0)
    }
}

impl core::error::Error for UnknownSnippet {}

/// Keeps the last `budget` characters of `text`, cutting on a char boundary.
pub(crate) fn tail_chars(text: &str, budget: usize) -> &str {
    let total = text.chars().count();
    if total <= budget {
        return text;
    }
    let skip = total - budget;
    match text.char_indices().nth(skip) {
        Some((idx, _)) => &text[idx..],
        None => "",
    }
}

/// Builds the context window for snippet `id`. The processed window is
/// front-truncated to `budget` characters; the current and following
/// snippets are never truncated.
pub fn snippet_context(
    doc: &SourceDocument,
    id: u64,
    budget: usize,
) -> Result<ContextWindow, UnknownSnippet> {
    let pos = doc
        .snippets
        .iter()
        .position(|s| s.id == id)
        .ok_or(UnknownSnippet(id))?;
    let mut processed = String::new();
    for s in &doc.snippets[..pos] {
        processed.push_str(&s.body);
    }
    let mut truncated = false;
    if processed.chars().count() > budget {
        truncated = true;
        let marker_len = TRUNCATION_MARKER.chars().count();
        let keep = budget.saturating_sub(marker_len);
        let tail = tail_chars(&processed, keep);
        let mut new = String::with_capacity(TRUNCATION_MARKER.len() + tail.len());
        new.push_str(TRUNCATION_MARKER);
        new.push_str(tail);
        processed = new;
    }
    Ok(ContextWindow {
        processed,
        truncated,
        current: doc.snippets[pos].body.clone(),
        following: doc.snippets.get(pos + 1).map(|s| s.body.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = "preamble line\n% !snippet 1\nfirst body.\n% !snippet 2\nsecond body.\n";

    #[test]
    fn splits_two_snippets_with_preamble() {
        let doc = split_document(TWO, "two.tex").unwrap();
        assert_eq!(doc.preamble, "preamble line\n");
        assert_eq!(doc.snippets.len(), 2);
        assert_eq!(doc.snippets[0].id, 1);
        assert_eq!(doc.snippets[0].body, "first body.\n");
        assert_eq!(doc.snippets[1].id, 2);
        assert_eq!(doc.snippets[1].line_range, (5, 5));
    }

    #[test]
    fn reassembly_is_byte_exact() {
        let doc = split_document(TWO, "two.tex").unwrap();
        assert_eq!(doc.join(), TWO);
        // Also without a trailing newline.
        let no_nl = "% !snippet 3\nbody without newline.";
        let doc = split_document(no_nl, "x.tex").unwrap();
        assert_eq!(doc.join(), no_nl);
    }

    #[test]
    fn duplicate_and_non_monotone_ids_rejected() {
        let dup = "% !snippet 1\na.\n% !snippet 1\nb.\n";
        assert_eq!(
            split_document(dup, "x"),
            Err(SplitError::DuplicateSnippetId { id: 1, line: 3 })
        );
        let back = "% !snippet 2\na.\n% !snippet 1\nb.\n";
        assert_eq!(
            split_document(back, "x"),
            Err(SplitError::NonMonotoneIds { id: 1, line: 3 })
        );
    }

    #[test]
    fn missing_delimiters_and_empty_bodies_rejected() {
        assert_eq!(split_document("plain text\n", "x"), Err(SplitError::NoDelimiters));
        let empty = "% !snippet 1\n  \n% !snippet 2\nreal.\n";
        assert!(matches!(
            split_document(empty, "x"),
            Err(SplitError::EmptySnippet { id: 1, .. })
        ));
    }

    #[test]
    fn malformed_delimiter_is_an_error() {
        let bad = "% !snippet zero\nbody.\n";
        assert_eq!(split_document(bad, "x"), Err(SplitError::BadDelimiter { line: 1 }));
        let zero = "% !snippet 0\nbody.\n";
        assert_eq!(split_document(zero, "x"), Err(SplitError::BadDelimiter { line: 1 }));
    }

    #[test]
    fn sentence_estimates_skip_math_and_comments() {
        assert_eq!(sentence_estimate("$x$."), 1);
        assert_eq!(sentence_estimate("One. Two! Three? Four."), 4);
        assert_eq!(sentence_estimate("version 1.2 of the tool"), 0);
        assert_eq!(sentence_estimate("math $a. b! c?$ only"), 0);
        assert_eq!(sentence_estimate("% hidden. comment.\nreal one."), 1);
        assert_eq!(sentence_estimate("display \\[x=1.\\] stays"), 0);
    }

    #[test]
    fn validate_flags_long_and_empty_snippets() {
        let text = "% !snippet 1\nA. B. C. D. E. F. G.\n% !snippet 2\n$x$.\n% !snippet 3\nno terminator\n";
        let doc = split_document(text, "x").unwrap();
        let warnings = validate_snippets(&doc);
        assert!(warnings.contains(&SnippetWarning::TooLong { id: 1, sentences: 7 }));
        assert!(warnings.contains(&SnippetWarning::NoSentences { id: 3 }));
        assert!(!warnings.iter().any(
            |w| matches!(w, SnippetWarning::TooLong { id: 2, .. } | SnippetWarning::NoSentences { id: 2 })
        ));
    }

    #[test]
    fn validate_flags_unbalanced_environments_and_math() {
        let text = "% !snippet 1\n\\begin{align}x = 1.\n% !snippet 2\nmath $x never closes.\n";
        let doc = split_document(text, "x").unwrap();
        let warnings = validate_snippets(&doc);
        assert!(warnings.contains(&SnippetWarning::UnbalancedEnvironment {
            id: 1,
            name: "align".into()
        }));
        assert!(warnings.contains(&SnippetWarning::UnbalancedMath { id: 2 }));
    }

    #[test]
    fn validate_is_pure() {
        let doc = split_document(TWO, "x").unwrap();
        let first = validate_snippets(&doc);
        let again = validate_snippets(&doc);
        assert_eq!(first, again);
        assert_eq!(doc.join(), TWO);
    }

    #[test]
    fn context_boundaries() {
        let doc = split_document(TWO, "x").unwrap();
        let first = snippet_context(&doc, 1, 1000).unwrap();
        assert_eq!(first.processed, "");
        assert!(!first.truncated);
        assert_eq!(first.following.as_deref(), Some("second body.\n"));
        let last = snippet_context(&doc, 2, 1000).unwrap();
        assert_eq!(last.processed, "first body.\n");
        assert_eq!(last.following, None);
        assert_eq!(snippet_context(&doc, 9, 1000), Err(UnknownSnippet(9)));
    }

    #[test]
    fn context_truncation_respects_budget() {
        let mut text = String::from("% !snippet 1\n");
        for i in 0..50 {
            text.push_str("filler sentence number ");
            text.push_str(&i.to_string());
            text.push_str(".\n");
        }
        text.push_str("% !snippet 2\ncurrent.\n% !snippet 3\nnext.\n");
        let doc = split_document(&text, "x").unwrap();
        let budget = 120;
        let ctx = snippet_context(&doc, 2, budget).unwrap();
        assert!(ctx.truncated);
        assert!(ctx.processed.starts_with(TRUNCATION_MARKER));
        assert!(ctx.processed.chars().count() <= budget);
        assert_eq!(ctx.current, "current.\n");
        assert_eq!(ctx.following.as_deref(), Some("next.\n"));
    }

    #[test]
    fn region_scanner_classifies_math_kinds() {
        let (regions, balanced) = scan_regions("a $x$ b $$y$$ c \\(z\\) d \\[w\\] e % f\n");
        assert!(balanced);
        let kinds: Vec<RegionKind> = regions.iter().map(|r| r.kind).collect();
        assert_eq!(
            kinds,
            [
                RegionKind::Text,
                RegionKind::MathInline,
                RegionKind::Text,
                RegionKind::MathDisplay,
                RegionKind::Text,
                RegionKind::MathInline,
                RegionKind::Text,
                RegionKind::MathDisplay,
                RegionKind::Text,
                RegionKind::Comment,
                RegionKind::Text,
            ]
        );
        // Escaped dollars and percents stay text.
        let (regions, balanced) = scan_regions("price \\$5 and \\% done");
        assert!(balanced);
        assert_eq!(regions.len(), 1);
        assert_eq!(regions[0].kind, RegionKind::Text);
    }
}
