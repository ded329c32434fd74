//! FNL parser.
//!
//! Grammar, line oriented:
//!
//! ```text
//! document   = { comment | blank | header | bullet }
//! header     = "## snippet " id
//! comment    = "#" ...
//! bullet     = indent "- " (scope-line | spo-line)
//! scope-line = ("setup" | "premise" | "assertion") ":"
//! spo-line   = term SP ident ":" SP term
//! term       = ident | quoted | math | number
//! ```
//!
//! Indentation is two spaces per nesting level. Parsing is all-or-nothing
//! per snippet block: a line error poisons only the block it appears in,
//! other blocks still parse. The parser never panics on arbitrary input; it
//! reports diagnostics instead.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::{FnlDocument, FnlStatement, StatementBody, Term};
use super::vocab::{is_identifier, ObjectKind, PredicateVocabulary};
use crate::kgraph::{braces_balanced, is_valid_decimal, Literal, ScopeKind};

/// Diagnostic severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

/// A parse or lint finding, carrying a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: usize,
    pub column: usize,
    pub code: &'static str,
    pub message: String,
}

impl Diagnostic {
    pub fn error(line: usize, column: usize, code: &'static str, message: String) -> Self {
        Diagnostic {
            severity: Severity::Error,
            line,
            column,
            code,
            message,
        }
    }

    pub fn warning(line: usize, column: usize, code: &'static str, message: String) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            line,
            column,
            code,
            message,
        }
    }
}

impl core::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{}:{}: {} [{}] {}",
            self.line, self.column, sev, self.code, self.message
        )
    }
}

/// Diagnostic codes shared by the parser and the linter.
pub mod codes {
    pub const UNKNOWN_PREDICATE: &str = "unknown-predicate";
    pub const BAD_INDENT: &str = "bad-indent";
    pub const MALFORMED_TERM: &str = "malformed-term";
    pub const SCOPE_KEYWORD_MISUSE: &str = "scope-keyword-misuse";
    pub const DUPLICATE_BLOCK: &str = "duplicate-block";
    pub const UNRESOLVED_REFERENCE: &str = "unresolved-reference";
    pub const DUPLICATE_STATEMENT: &str = "duplicate-statement";
    pub const SCOPE_OUTSIDE_THEOREM: &str = "scope-outside-theorem";
    pub const EMPTY_SCOPE: &str = "empty-scope";
}

/// Result of a parse: blocks that parsed cleanly plus all diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseOutcome {
    pub document: FnlDocument,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseOutcome {
    /// True when no error-severity diagnostic was produced.
    pub fn is_clean(&self) -> bool {
        self.diagnostics
            .iter()
            .all(|d| d.severity != Severity::Error)
    }
}

/// Recognizes `## snippet <id>` headers.
fn block_header(line: &str) -> Option<Result<u64, ()>> {
    let rest = line.strip_prefix("## snippet")?;
    if !rest.starts_with([' ', '\t']) {
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

struct BlockBuilder {
    id: u64,
    roots: Vec<FnlStatement>,
    stack: Vec<FnlStatement>,
    poisoned: bool,
}

impl BlockBuilder {
    fn new(id: u64) -> Self {
        BlockBuilder {
            id,
            roots: Vec::new(),
            stack: Vec::new(),
            poisoned: false,
        }
    }

    fn settle(&mut self, depth: usize) {
        while self.stack.len() > depth {
            let done = self.stack.pop().expect("stack nonempty");
            match self.stack.last_mut() {
                Some(parent) => parent.children.push(done),
                None => self.roots.push(done),
            }
        }
    }

    fn push(&mut self, stmt: FnlStatement) {
        self.settle(stmt.depth);
        self.stack.push(stmt);
    }

    fn finish(mut self, doc: &mut FnlDocument) {
        self.settle(0);
        // The implicit headerless block 0 only exists when it has content.
        if !self.poisoned && !(self.id == 0 && self.roots.is_empty()) {
            doc.blocks.insert(self.id, self.roots);
        }
    }
}

/// Parses FNL text against a vocabulary.
pub fn parse_fnl(text: &str, vocab: &PredicateVocabulary) -> ParseOutcome {
    let mut document = FnlDocument::default();
    let mut diagnostics = Vec::new();
    let mut block = BlockBuilder::new(0);
    let mut seen_blocks: Vec<u64> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            continue;
        }
        if let Some(header) = block_header(line) {
            match header {
                Ok(id) => {
                    block.finish(&mut document);
                    block = BlockBuilder::new(id);
                    if seen_blocks.contains(&id) {
                        diagnostics.push(Diagnostic::error(
                            line_no,
                            1,
                            codes::DUPLICATE_BLOCK,
                            format!("snippet block {id} already defined"),
                        ));
                        block.poisoned = true;
                    } else {
                        seen_blocks.push(id);
                    }
                }
                Err(()) => {
                    diagnostics.push(Diagnostic::error(
                        line_no,
                        1,
                        codes::DUPLICATE_BLOCK,
                        "malformed snippet header".to_string(),
                    ));
                    block.poisoned = true;
                }
            }
            continue;
        }
        if line.starts_with('#') {
            continue; // comment
        }
        if block.poisoned {
            continue; // all-or-nothing per block: first error wins
        }

        let before = diagnostics.len();
        match parse_bullet(line, line_no, block.stack.len(), vocab, &mut diagnostics) {
            Some(stmt) => block.push(stmt),
            None => {
                debug_assert!(diagnostics.len() > before, "failure must add a diagnostic");
                block.poisoned = true;
            }
        }
    }
    block.finish(&mut document);

    ParseOutcome {
        document,
        diagnostics,
    }
}

/// Parses one bullet line into a statement. Pushes a diagnostic and returns
/// `None` on failure.
fn parse_bullet(
    line: &str,
    line_no: usize,
    open_depth: usize,
    vocab: &PredicateVocabulary,
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<FnlStatement> {
    let mut indent = 0usize;
    for c in line.chars() {
        match c {
            ' ' => indent += 1,
            '\t' => {
                diagnostics.push(Diagnostic::error(
                    line_no,
                    indent + 1,
                    codes::BAD_INDENT,
                    "tabs are not allowed in indentation".to_string(),
                ));
                return None;
            }
            _ => break,
        }
    }
    if !indent.is_multiple_of(2) {
        diagnostics.push(Diagnostic::error(
            line_no,
            indent + 1,
            codes::BAD_INDENT,
            format!("indentation of {indent} spaces is not a multiple of two"),
        ));
        return None;
    }
    let depth = indent / 2;
    if depth > open_depth {
        diagnostics.push(Diagnostic::error(
            line_no,
            indent + 1,
            codes::BAD_INDENT,
            format!("nesting jumps to depth {depth} with no parent at depth {}", depth - 1),
        ));
        return None;
    }

    let content = &line[indent..];
    let Some(content) = content.strip_prefix("- ") else {
        diagnostics.push(Diagnostic::error(
            line_no,
            indent + 1,
            codes::MALFORMED_TERM,
            "expected a bullet line starting with \"- \"".to_string(),
        ));
        return None;
    };
    let content_col = indent + 3; // 1-based column of the first content char

    let body = parse_line_body(content, line_no, content_col, vocab, diagnostics)?;
    Some(FnlStatement {
        body,
        depth,
        source_line: line_no,
        children: Vec::new(),
    })
}

fn parse_line_body(
    content: &str,
    line_no: usize,
    content_col: usize,
    vocab: &PredicateVocabulary,
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<StatementBody> {
    let mut cursor = Cursor {
        text: content,
        pos: 0,
        line: line_no,
        base_col: content_col,
    };

    // Keyword-first lines: either a scope keyword or a missing subject.
    if let Some((ident, after)) = cursor.peek_ident_colon() {
        if let Some(kind) = ScopeKind::parse(ident) {
            if !content[after..].trim().is_empty() {
                diagnostics.push(Diagnostic::error(
                    line_no,
                    content_col,
                    codes::SCOPE_KEYWORD_MISUSE,
                    format!("scope keyword {ident:?} takes no subject or object"),
                ));
                return None;
            }
            return Some(StatementBody::Scope(kind));
        }
        diagnostics.push(Diagnostic::error(
            line_no,
            content_col,
            codes::MALFORMED_TERM,
            format!("missing subject before predicate {ident:?}"),
        ));
        return None;
    }

    let subject = cursor.parse_term(diagnostics)?;
    if matches!(subject, Term::Literal(_)) {
        diagnostics.push(Diagnostic::error(
            line_no,
            content_col,
            codes::MALFORMED_TERM,
            "a literal cannot be the subject of a statement".to_string(),
        ));
        return None;
    }
    if !cursor.skip_spaces() {
        diagnostics.push(cursor.error(codes::MALFORMED_TERM, "expected predicate after subject"));
        return None;
    }

    let pred_col = cursor.col();
    let Some((ident, after)) = cursor.peek_ident_colon() else {
        diagnostics.push(cursor.error(
            codes::MALFORMED_TERM,
            "expected \"predicate:\" after the subject",
        ));
        return None;
    };
    let predicate = ident.to_string();
    cursor.pos = after;
    if let Some(kind) = ScopeKind::parse(&predicate) {
        diagnostics.push(Diagnostic::error(
            line_no,
            pred_col,
            codes::SCOPE_KEYWORD_MISUSE,
            format!("scope keyword {kind} cannot be used as a predicate"),
        ));
        return None;
    }
    let Some(object_kind) = vocab.object_kind(&predicate) else {
        diagnostics.push(Diagnostic::error(
            line_no,
            pred_col,
            codes::UNKNOWN_PREDICATE,
            format!("predicate {predicate:?} is not in the vocabulary"),
        ));
        return None;
    };

    if !cursor.skip_spaces() {
        diagnostics.push(cursor.error(codes::MALFORMED_TERM, "expected object after predicate"));
        return None;
    }
    let object_col = cursor.col();
    let object = cursor.parse_term(diagnostics)?;
    if !cursor.rest().trim().is_empty() {
        diagnostics.push(cursor.error(
            codes::MALFORMED_TERM,
            "unexpected trailing content after object",
        ));
        return None;
    }

    let object = match classify_object(object, object_kind) {
        Ok(o) => o,
        Err(msg) => {
            diagnostics.push(Diagnostic::error(
                line_no,
                object_col,
                codes::MALFORMED_TERM,
                format!("predicate {predicate:?} {msg}"),
            ));
            return None;
        }
    };

    Some(StatementBody::Spo {
        subject,
        predicate,
        object,
    })
}

/// Applies the vocabulary's object-kind rules. Quoted strings are new terms
/// where an entity is expected and string literals otherwise.
fn classify_object(term: Term, kind: ObjectKind) -> Result<Term, &'static str> {
    match kind {
        ObjectKind::Entity => match term {
            Term::Literal(Literal::Str(s)) => Ok(Term::NewTerm(s)),
            Term::Literal(_) => Err("expects an entity, found a literal"),
            other => Ok(other),
        },
        ObjectKind::Literal => match term {
            Term::NewTerm(s) | Term::Literal(Literal::Str(s)) => Ok(Term::Literal(Literal::Str(s))),
            Term::Literal(l) => Ok(Term::Literal(l)),
            Term::Reference(_) => Err("expects a literal, found a reference"),
            Term::Math(_) => Err("expects a literal, found math"),
        },
        ObjectKind::Math => match term {
            Term::Math(m) => Ok(Term::Math(m)),
            _ => Err("expects a $...$ math term"),
        },
        ObjectKind::Any => match term {
            Term::NewTerm(s) => Ok(Term::Literal(Literal::Str(s))),
            other => Ok(other),
        },
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    base_col: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    /// 1-based column of the current position.
    fn col(&self) -> usize {
        self.base_col + self.text[..self.pos].chars().count()
    }

    fn error(&self, code: &'static str, message: &str) -> Diagnostic {
        Diagnostic::error(self.line, self.col(), code, message.to_string())
    }

    fn skip_spaces(&mut self) -> bool {
        let before = self.pos;
        while self.rest().starts_with(' ') {
            self.pos += 1;
        }
        self.pos > before
    }

    /// If the text at the cursor is `ident:`, returns the identifier and the
    /// position after the colon without consuming.
    fn peek_ident_colon(&self) -> Option<(&'a str, usize)> {
        let rest = self.rest();
        let end = rest
            .char_indices()
            .find(|(_, c)| !(c.is_ascii_lowercase() || c.is_ascii_digit() || *c == '_'))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        if end == 0 {
            return None;
        }
        let ident = &rest[..end];
        if !is_identifier(ident) || !rest[end..].starts_with(':') {
            return None;
        }
        Some((ident, self.pos + end + 1))
    }

    fn parse_term(&mut self, diagnostics: &mut Vec<Diagnostic>) -> Option<Term> {
        let rest = self.rest();
        let Some(first) = rest.chars().next() else {
            diagnostics.push(self.error(codes::MALFORMED_TERM, "expected a term"));
            return None;
        };
        match first {
            '"' => match crate::textenc::parse_quoted(rest) {
                Some((value, used)) => {
                    self.pos += used;
                    if value.trim().is_empty() {
                        diagnostics.push(self.error(
                            codes::MALFORMED_TERM,
                            "quoted term must not be empty",
                        ));
                        return None;
                    }
                    // Disambiguated by the predicate's object kind later;
                    // subjects treat quoted strings as new terms.
                    Some(Term::NewTerm(value))
                }
                None => {
                    diagnostics.push(self.error(
                        codes::MALFORMED_TERM,
                        "unterminated or malformed quoted string",
                    ));
                    None
                }
            },
            '$' => {
                let inner = &rest[1..];
                match inner.find('$') {
                    Some(end) => {
                        let math = inner[..end].trim();
                        self.pos += end + 2;
                        if math.is_empty() {
                            diagnostics.push(
                                self.error(codes::MALFORMED_TERM, "math term must not be empty"),
                            );
                            return None;
                        }
                        if !braces_balanced(math) {
                            diagnostics.push(self.error(
                                codes::MALFORMED_TERM,
                                "math term has unbalanced braces",
                            ));
                            return None;
                        }
                        Some(Term::Math(math.to_string()))
                    }
                    None => {
                        diagnostics.push(
                            self.error(codes::MALFORMED_TERM, "unterminated math term"),
                        );
                        None
                    }
                }
            }
            c if c.is_ascii_digit() || c == '-' => {
                let end = rest
                    .char_indices()
                    .find(|(_, c)| !(c.is_ascii_digit() || *c == '.' || *c == '-'))
                    .map(|(i, _)| i)
                    .unwrap_or(rest.len());
                let number = &rest[..end];
                self.pos += end;
                if is_valid_decimal(number) {
                    Some(Term::Literal(Literal::Dec(number.to_string())))
                } else if let Ok(n) = number.parse::<i64>() {
                    Some(Term::Literal(Literal::Int(n)))
                } else {
                    diagnostics.push(
                        self.error(codes::MALFORMED_TERM, "malformed numeric literal"),
                    );
                    None
                }
            }
            c if c.is_ascii_lowercase() => {
                let end = rest
                    .char_indices()
                    .find(|(_, c)| !(c.is_ascii_lowercase() || c.is_ascii_digit() || *c == '_'))
                    .map(|(i, _)| i)
                    .unwrap_or(rest.len());
                let ident = &rest[..end];
                self.pos += end;
                Some(Term::Reference(ident.to_string()))
            }
            other => {
                diagnostics.push(self.error(
                    codes::MALFORMED_TERM,
                    &format!("unexpected character {other:?} at start of term"),
                ));
                None
            }
        }
    }
}
