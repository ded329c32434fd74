//! LaTeX-to-HTML conversion for the supported source subset.
//!
//! Supported: paragraphs (blank-line separated), `\section` family,
//! `\textit`/`\emph`/`\textbf`, `itemize`/`enumerate`, inline and display
//! math, comments (dropped), common escaped characters and the usual
//! preamble commands (dropped). Math is never rewritten: its LaTeX source is
//! emitted verbatim (HTML-escaped) inside `\( .. \)` / `\[ .. \]` spans for
//! a client-side math renderer. Anything else passes through verbatim with a
//! warning.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Conversion result for one body of LaTeX.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HtmlFragment {
    pub html: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnbalancedInput(pub String);

impl fmt::Display for UnbalancedInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unbalanced input: {}", self.0)
    }
}

impl core::error::Error for UnbalancedInput {}

pub(crate) fn escape_html(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
    out
}

/// Converts one snippet body (or the preamble) to an HTML fragment.
pub fn latex_to_html(body: &str) -> Result<HtmlFragment, UnbalancedInput> {
    let (_, balanced) = crate::latex::scan_regions(body);
    if !balanced {
        return Err(UnbalancedInput("math delimiters never close".to_string()));
    }
    let mut converter = Converter::new();
    converter.block_flow(body);
    converter.finish();
    Ok(HtmlFragment {
        html: converter.out,
        warnings: converter.warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ListKind {
    Unordered,
    Ordered,
}

impl ListKind {
    fn tag(self) -> &'static str {
        match self {
            ListKind::Unordered => "ul",
            ListKind::Ordered => "ol",
        }
    }
}

/// One open list environment and whether it has an open `<li>`.
struct ListLevel {
    kind: ListKind,
    item_open: bool,
}

struct Converter {
    out: String,
    warnings: Vec<String>,
    paragraph: String,
    lists: Vec<ListLevel>,
}

impl Converter {
    fn new() -> Self {
        Converter {
            out: String::new(),
            warnings: Vec::new(),
            paragraph: String::new(),
            lists: Vec::new(),
        }
    }

    fn in_open_item(&self) -> bool {
        self.lists.last().is_some_and(|l| l.item_open)
    }

    fn flush_paragraph(&mut self) {
        let content = self.paragraph.trim();
        if !content.is_empty() {
            if self.in_open_item() {
                // Inside a list item content flows without <p>.
                if !self.out.ends_with("<li>") {
                    self.out.push(' ');
                }
                self.out.push_str(content);
            } else {
                self.out.push_str("<p>");
                self.out.push_str(content);
                self.out.push_str("</p>\n");
            }
        }
        self.paragraph.clear();
    }

    /// Closes the current level's item, if one is open.
    fn close_item(&mut self) {
        self.flush_paragraph();
        if let Some(level) = self.lists.last_mut() {
            if level.item_open {
                level.item_open = false;
                self.out.push_str("</li>\n");
            }
        }
    }

    fn finish(&mut self) {
        self.close_item();
        self.flush_paragraph();
        while let Some(level) = self.lists.pop() {
            if level.item_open {
                self.out.push_str("</li>\n");
            }
            self.warnings
                .push(format!("unclosed environment {:?}", level.kind.tag()));
            self.out.push_str("</");
            self.out.push_str(level.kind.tag());
            self.out.push_str(">\n");
        }
    }

    /// Block-level flow: paragraphs, headings, lists, with inline content
    /// rendered into the current paragraph buffer.
    fn block_flow(&mut self, text: &str) {
        let mut rest = text;
        while !rest.is_empty() {
            // Paragraph break: a whitespace run containing a blank line.
            if let Some(after) = eat_paragraph_break(rest) {
                if self.in_open_item() {
                    self.paragraph.push(' ');
                } else {
                    self.flush_paragraph();
                }
                rest = after;
                continue;
            }
            let consumed = self.step(rest);
            debug_assert!(consumed > 0, "converter must always make progress");
            rest = &rest[consumed..];
        }
    }

    /// Consumes one construct from the start of `rest`, returning its byte
    /// length.
    fn step(&mut self, rest: &str) -> usize {
        let bytes = rest.as_bytes();
        match bytes[0] {
            b'%' => {
                // Comment to end of line; the newline itself stays text.
                rest.find('\n').unwrap_or(rest.len())
            }
            b'$' => self.math(rest),
            b'\\' => self.command(rest),
            b'{' | b'}' => {
                // Bare grouping braces pass through as text.
                self.paragraph.push(rest.as_bytes()[0] as char);
                1
            }
            _ => {
                let mut end = rest
                    .char_indices()
                    .find(|(_, c)| matches!(c, '%' | '$' | '\\' | '{' | '}'))
                    .map(|(i, _)| i)
                    .unwrap_or(rest.len());
                // Stop at paragraph breaks so the outer loop can split.
                if let Some(break_pos) = find_paragraph_break(&rest[..end]) {
                    end = break_pos;
                }
                let chunk = &rest[..end];
                self.paragraph.push_str(&escape_html(chunk));
                end.max(1)
            }
        }
    }

    fn math(&mut self, rest: &str) -> usize {
        let display = rest.as_bytes().get(1) == Some(&b'$');
        let open = if display { 2 } else { 1 };
        let close = find_math_close(rest, open, if display { "$$" } else { "$" });
        let (inner, consumed) = match close {
            Some(pos) => (&rest[open..pos], pos + open),
            None => (&rest[open..], rest.len()),
        };
        self.push_math(inner, display);
        consumed
    }

    fn push_math(&mut self, inner: &str, display: bool) {
        let class = if display { "math display" } else { "math inline" };
        let (open, close) = if display { ("\\[", "\\]") } else { ("\\(", "\\)") };
        self.paragraph.push_str("<span class=\"");
        self.paragraph.push_str(class);
        self.paragraph.push_str("\">");
        self.paragraph.push_str(open);
        self.paragraph.push_str(&escape_html(inner));
        self.paragraph.push_str(close);
        self.paragraph.push_str("</span>");
    }

    fn command(&mut self, rest: &str) -> usize {
        debug_assert!(rest.starts_with('\\'));
        let after = &rest[1..];
        let Some(first) = after.chars().next() else {
            self.paragraph.push('\\');
            return 1;
        };
        // Escaped single characters and line breaks.
        if !first.is_ascii_alphabetic() {
            return match first {
                '(' | '[' => {
                    let display = first == '[';
                    let closer = if display { "\\]" } else { "\\)" };
                    let close = find_math_close(rest, 2, closer);
                    let (inner, consumed) = match close {
                        Some(pos) => (&rest[2..pos], pos + 2),
                        None => (&rest[2..], rest.len()),
                    };
                    self.push_math(inner, display);
                    consumed
                }
                '\\' => {
                    self.paragraph.push_str("<br>");
                    2
                }
                '%' | '$' | '&' | '_' | '{' | '}' | '#' => {
                    self.paragraph.push_str(&escape_html(&first.to_string()));
                    1 + first.len_utf8()
                }
                other => {
                    self.paragraph.push('\\');
                    self.paragraph.push(other);
                    self.warnings
                        .push(format!("unsupported escape \\{other} passed through"));
                    1 + other.len_utf8()
                }
            };
        }

        let name_end = after
            .char_indices()
            .find(|(_, c)| !c.is_ascii_alphabetic())
            .map(|(i, _)| i)
            .unwrap_or(after.len());
        let name = &after[..name_end];
        let mut consumed = 1 + name_end;

        match name {
            "textit" | "emph" | "textbf" => {
                let tag = if name == "textbf" { "strong" } else { "em" };
                match braced_arg(&rest[consumed..]) {
                    Some((arg, used)) => {
                        consumed += used;
                        let mut inner = Converter::new();
                        inner.block_flow(arg);
                        self.warnings.append(&mut inner.warnings);
                        self.paragraph.push('<');
                        self.paragraph.push_str(tag);
                        self.paragraph.push('>');
                        self.paragraph.push_str(inner.paragraph.trim());
                        self.paragraph.push_str("</");
                        self.paragraph.push_str(tag);
                        self.paragraph.push('>');
                    }
                    None => {
                        self.paragraph.push_str(&escape_html(&rest[..consumed]));
                        self.warnings
                            .push(format!("\\{name} without braced argument passed through"));
                    }
                }
                consumed
            }
            "section" | "subsection" | "subsubsection" | "title" | "author" => {
                let (open, close) = match name {
                    "section" => ("<h2>", "</h2>\n"),
                    "subsection" => ("<h3>", "</h3>\n"),
                    "subsubsection" => ("<h4>", "</h4>\n"),
                    "title" => ("<h1>", "</h1>\n"),
                    _ => ("<p class=\"author\">", "</p>\n"),
                };
                consumed += starred(&rest[consumed..]);
                match braced_arg(&rest[consumed..]) {
                    Some((arg, used)) => {
                        consumed += used;
                        self.flush_paragraph();
                        let mut inner = Converter::new();
                        inner.block_flow(arg);
                        self.warnings.append(&mut inner.warnings);
                        self.out.push_str(open);
                        self.out.push_str(inner.paragraph.trim());
                        self.out.push_str(close);
                    }
                    None => {
                        self.paragraph.push_str(&escape_html(&rest[..consumed]));
                        self.warnings
                            .push(format!("\\{name} without braced argument passed through"));
                    }
                }
                consumed
            }
            "begin" | "end" => match braced_arg(&rest[consumed..]) {
                Some((env, used)) => {
                    consumed += used;
                    self.environment(name == "begin", env, &rest[..consumed]);
                    consumed
                }
                None => {
                    self.paragraph.push_str(&escape_html(&rest[..consumed]));
                    self.warnings
                        .push(format!("\\{name} without environment name passed through"));
                    consumed
                }
            },
            "item" => {
                if self.lists.is_empty() {
                    self.paragraph.push_str(&escape_html(&rest[..consumed]));
                    self.warnings
                        .push("\\item outside a list passed through".to_string());
                } else {
                    self.close_item();
                    self.out.push_str("<li>");
                    if let Some(level) = self.lists.last_mut() {
                        level.item_open = true;
                    }
                }
                consumed
            }
            "maketitle" => {
                self.flush_paragraph();
                consumed
            }
            "documentclass" | "usepackage" | "date" => {
                consumed += optional_arg(&rest[consumed..]);
                consumed += braced_arg(&rest[consumed..]).map(|(_, used)| used).unwrap_or(0);
                consumed
            }
            _ => {
                // Unknown command: pass the token through verbatim; its
                // arguments (if any) flow along as ordinary text.
                self.paragraph.push_str(&escape_html(&rest[..consumed]));
                self.warnings
                    .push(format!("unsupported command \\{name} passed through"));
                consumed
            }
        }
    }

    fn environment(&mut self, opening: bool, env: &str, raw: &str) {
        match env {
            "itemize" | "enumerate" => {
                let kind = if env == "itemize" {
                    ListKind::Unordered
                } else {
                    ListKind::Ordered
                };
                if opening {
                    // A list opening inside an open item nests within it.
                    self.flush_paragraph();
                    self.lists.push(ListLevel {
                        kind,
                        item_open: false,
                    });
                    self.out.push('<');
                    self.out.push_str(kind.tag());
                    self.out.push_str(">\n");
                } else {
                    self.close_item();
                    match self.lists.pop() {
                        Some(level) => {
                            self.out.push_str("</");
                            self.out.push_str(level.kind.tag());
                            self.out.push_str(">\n");
                            if level.kind != kind {
                                self.warnings.push(format!(
                                    "environment mismatch: closed {env:?} over {:?}",
                                    level.kind.tag()
                                ));
                            }
                        }
                        None => {
                            self.warnings
                                .push(format!("\\end{{{env}}} without matching \\begin"));
                        }
                    }
                }
            }
            "document" => {
                // Spans the whole file by construction; nothing to emit.
                self.flush_paragraph();
            }
            _ => {
                self.paragraph.push_str(&escape_html(raw));
                self.warnings
                    .push(format!("unsupported environment {env:?} passed through"));
            }
        }
    }
}

/// Position of the first newline that opens a blank line (a newline followed
/// only by spaces/tabs/carriage returns up to another newline), if any.
fn find_paragraph_break(chunk: &str) -> Option<usize> {
    let bytes = chunk.as_bytes();
    for i in 0..bytes.len() {
        if bytes[i] != b'\n' {
            continue;
        }
        let mut j = i + 1;
        while j < bytes.len() && matches!(bytes[j], b' ' | b'\t' | b'\r') {
            j += 1;
        }
        if j < bytes.len() && bytes[j] == b'\n' {
            return (i > 0).then_some(i);
        }
    }
    None
}

/// Consumes leading whitespace if it contains at least one blank line.
fn eat_paragraph_break(text: &str) -> Option<&str> {
    let mut newlines = 0;
    let mut end = 0;
    for (i, c) in text.char_indices() {
        if c == '\n' {
            newlines += 1;
        } else if !c.is_whitespace() {
            break;
        }
        end = i + c.len_utf8();
    }
    (newlines >= 2).then(|| &text[end..])
}

fn starred(rest: &str) -> usize {
    usize::from(rest.starts_with('*'))
}

/// Reads `{...}` at the start of `rest`, balancing nested braces and
/// skipping escapes and math. Returns the inner slice and bytes consumed.
fn braced_arg(rest: &str) -> Option<(&str, usize)> {
    if !rest.starts_with('{') {
        return None;
    }
    let bytes = rest.as_bytes();
    let mut depth = 0usize;
    let mut i = 0usize;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'{' => {
                depth += 1;
                i += 1;
            }
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some((&rest[1..i], i + 1));
                }
                i += 1;
            }
            _ => i += 1,
        }
    }
    None
}

/// Reads an optional `[...]` argument; returns bytes consumed.
fn optional_arg(rest: &str) -> usize {
    if !rest.starts_with('[') {
        return 0;
    }
    match rest.find(']') {
        Some(pos) => pos + 1,
        None => 0,
    }
}

/// Finds the byte position of the closing math delimiter, starting after the
/// opener of `open_len` bytes. Works on bytes; all closers are ASCII.
fn find_math_close(rest: &str, open_len: usize, closer: &str) -> Option<usize> {
    let bytes = rest.as_bytes();
    let cb = closer.as_bytes();
    let mut i = open_len;
    while i < bytes.len() {
        if bytes[i] == b'\\' && cb.len() == 1 {
            i += 2;
            continue;
        }
        if i + cb.len() <= bytes.len() && &bytes[i..i + cb.len()] == cb {
            return Some(i);
        }
        if bytes[i] == b'\\' {
            i += 2;
        } else {
            i += 1;
        }
    }
    None
}
