//! The `.kgt` graph text format.
//!
//! Line-oriented UTF-8, one record per line, tab-separated fields, designed
//! to diff cleanly under version control:
//!
//! ```text
//! kgt 1
//! #! ns main
//! E<TAB><uri><TAB><kind><TAB><label>[<TAB>key=value ...]
//! S<TAB><uri><TAB><subj><TAB><pred><TAB><obj-or-literal>[<TAB>scope=<uri>][<TAB>q:<rel>=<obj> ...]
//! ```
//!
//! Entities are emitted in URI order, then statements in URI order (which
//! equals assertion order). `#` starts a comment line; the `#!` directive on
//! line 2 records the allocation namespace. Literals are encoded as
//! `lit:str:"..."`, `lit:int:<n>` and `lit:dec:<d>`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::entity::{Entity, Item, Literal, Relation, ScopeItem, ScopeKind};
use super::graph::KnowledgeGraph;
use super::statement::{Node, Statement};
use super::uri::Uri;
use crate::textenc;

pub const FORMAT_HEADER: &str = "kgt 1";

/// Parse failure with 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextParseError {
    pub line: usize,
    pub message: String,
}

impl TextParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        TextParseError {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for TextParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl core::error::Error for TextParseError {}

fn node_text(node: &Node) -> String {
    match node {
        Node::Entity(u) => u.to_string(),
        Node::Literal(l) => l.encode(),
    }
}

fn parse_node(s: &str, line: usize) -> Result<Node, TextParseError> {
    if s.starts_with("lit:") {
        Literal::decode(s)
            .map(Node::Literal)
            .ok_or_else(|| TextParseError::new(line, format!("malformed literal {s:?}")))
    } else {
        parse_uri(s, line).map(Node::Entity)
    }
}

fn parse_uri(s: &str, line: usize) -> Result<Uri, TextParseError> {
    s.parse::<Uri>()
        .map_err(|e| TextParseError::new(line, format!("bad uri {s:?}: {e}")))
}

/// Serializes a graph deterministically. `parse(serialize(g))` reproduces
/// `g` exactly, including URIs and statement order.
pub fn serialize(graph: &KnowledgeGraph) -> String {
    let mut out = String::new();
    out.push_str(FORMAT_HEADER);
    out.push('\n');
    out.push_str("#! ns ");
    out.push_str(graph.namespace());
    out.push('\n');
    for (uri, entity) in graph.entities() {
        match entity {
            Entity::Item(item) => {
                out.push_str(&item_line(uri, item, None));
            }
            Entity::Scope(scope) => {
                out.push_str(&item_line(uri, &scope.item, Some(scope)));
            }
            Entity::Relation(rel) => {
                out.push_str("E\t");
                out.push_str(&uri.to_string());
                out.push_str("\trelation\t");
                out.push_str(&textenc::escape_field(&rel.label));
                if rel.builtin {
                    out.push_str("\tbuiltin=true");
                }
                out.push('\n');
            }
        }
    }
    for st in graph.statements() {
        out.push_str("S\t");
        out.push_str(&st.uri.to_string());
        out.push('\t');
        out.push_str(&st.subject.to_string());
        out.push('\t');
        out.push_str(&st.predicate.to_string());
        out.push('\t');
        out.push_str(&node_text(&st.object));
        if let Some(scope) = &st.scope {
            out.push_str("\tscope=");
            out.push_str(&scope.to_string());
        }
        for (rel, obj) in &st.qualifiers {
            out.push_str("\tq:");
            out.push_str(&rel.to_string());
            out.push('=');
            out.push_str(&node_text(obj));
        }
        out.push('\n');
    }
    out
}

fn item_line(uri: &Uri, item: &Item, scope: Option<&ScopeItem>) -> String {
    let mut out = String::from("E\t");
    out.push_str(&uri.to_string());
    out.push_str("\titem\t");
    out.push_str(&textenc::escape_field(&item.label));
    if let Some(desc) = &item.description {
        out.push_str("\tdesc=");
        out.push_str(&textenc::quote(desc));
    }
    if let Some(notation) = &item.notation {
        out.push_str("\tnotation=");
        out.push_str(&textenc::quote(notation));
    }
    if let Some(prov) = item.provenance {
        out.push_str("\tprov=");
        out.push_str(&prov.to_string());
    }
    if let Some(scope) = scope {
        out.push_str("\tscope_kind=");
        out.push_str(scope.kind.as_str());
        out.push_str("\tscope_parent=");
        out.push_str(&scope.parent.to_string());
    }
    out.push('\n');
    out
}

/// Parses the text form back into a graph.
pub fn parse(text: &str) -> Result<KnowledgeGraph, TextParseError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| TextParseError::new(1, "empty input, expected header"))?;
    if header.trim_end() != FORMAT_HEADER {
        return Err(TextParseError::new(
            1,
            format!("expected header {FORMAT_HEADER:?}, found {header:?}"),
        ));
    }

    // The namespace directive must precede all records, so scan for it first.
    let mut namespace = String::from("main");
    for line in text.lines().skip(1) {
        if let Some(rest) = line.strip_prefix("#!") {
            let mut parts = rest.split_whitespace();
            if parts.next() == Some("ns") {
                if let Some(ns) = parts.next() {
                    namespace = ns.to_string();
                }
            }
        } else if !line.starts_with('#') && !line.trim().is_empty() {
            break;
        }
    }

    let mut graph = KnowledgeGraph::bare(&namespace)
        .map_err(|e| TextParseError::new(2, e.to_string()))?;

    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        match fields.next() {
            Some("E") => parse_entity_line(&mut graph, fields, line_no)?,
            Some("S") => parse_statement_line(&mut graph, fields, line_no)?,
            Some(other) => {
                return Err(TextParseError::new(
                    line_no,
                    format!("unknown record type {other:?}"),
                ))
            }
            None => unreachable!("split always yields one element"),
        }
    }
    Ok(graph)
}

fn parse_entity_line<'a>(
    graph: &mut KnowledgeGraph,
    mut fields: impl Iterator<Item = &'a str>,
    line: usize,
) -> Result<(), TextParseError> {
    let uri = parse_uri(
        fields
            .next()
            .ok_or_else(|| TextParseError::new(line, "entity line missing uri"))?,
        line,
    )?;
    let kind = fields
        .next()
        .ok_or_else(|| TextParseError::new(line, "entity line missing kind"))?;
    let label_raw = fields
        .next()
        .ok_or_else(|| TextParseError::new(line, "entity line missing label"))?;
    let label = textenc::unescape_field(label_raw)
        .ok_or_else(|| TextParseError::new(line, format!("bad label escape {label_raw:?}")))?;

    let mut description = None;
    let mut notation = None;
    let mut provenance = None;
    let mut builtin = false;
    let mut scope_kind = None;
    let mut scope_parent = None;
    for extra in fields {
        let (key, value) = extra
            .split_once('=')
            .ok_or_else(|| TextParseError::new(line, format!("malformed field {extra:?}")))?;
        match key {
            "desc" => description = Some(unquote(value, line)?),
            "notation" => notation = Some(unquote(value, line)?),
            "prov" => {
                provenance = Some(value.parse::<u64>().map_err(|_| {
                    TextParseError::new(line, format!("bad provenance {value:?}"))
                })?)
            }
            "builtin" => builtin = value == "true",
            "scope_kind" => {
                scope_kind = Some(ScopeKind::parse(value).ok_or_else(|| {
                    TextParseError::new(line, format!("unknown scope kind {value:?}"))
                })?)
            }
            "scope_parent" => scope_parent = Some(parse_uri(value, line)?),
            _ => return Err(TextParseError::new(line, format!("unknown field {key:?}"))),
        }
    }

    if graph.contains(&uri) {
        return Err(TextParseError::new(line, format!("duplicate uri {uri}")));
    }

    let result = match kind {
        "item" => {
            let item = Item {
                uri,
                label,
                description,
                notation,
                provenance,
            };
            match (scope_kind, scope_parent) {
                (Some(kind), Some(parent)) => graph.insert_scope(ScopeItem { item, kind, parent }),
                (None, None) => graph.insert_item(item),
                _ => {
                    return Err(TextParseError::new(
                        line,
                        "scope_kind and scope_parent must appear together",
                    ))
                }
            }
        }
        "relation" => graph.insert_relation(Relation {
            uri,
            label,
            builtin,
        }),
        other => {
            return Err(TextParseError::new(
                line,
                format!("unknown entity kind {other:?}"),
            ))
        }
    };
    result.map_err(|e| TextParseError::new(line, e.to_string()))
}

fn parse_statement_line<'a>(
    graph: &mut KnowledgeGraph,
    mut fields: impl Iterator<Item = &'a str>,
    line: usize,
) -> Result<(), TextParseError> {
    let uri = parse_uri(
        fields
            .next()
            .ok_or_else(|| TextParseError::new(line, "statement line missing uri"))?,
        line,
    )?;
    let subject = parse_uri(
        fields
            .next()
            .ok_or_else(|| TextParseError::new(line, "statement line missing subject"))?,
        line,
    )?;
    let predicate = parse_uri(
        fields
            .next()
            .ok_or_else(|| TextParseError::new(line, "statement line missing predicate"))?,
        line,
    )?;
    let object = parse_node(
        fields
            .next()
            .ok_or_else(|| TextParseError::new(line, "statement line missing object"))?,
        line,
    )?;

    let mut scope = None;
    let mut qualifiers = Vec::new();
    for extra in fields {
        if let Some(value) = extra.strip_prefix("scope=") {
            scope = Some(parse_uri(value, line)?);
        } else if let Some(rest) = extra.strip_prefix("q:") {
            let (rel, obj) = rest
                .split_once('=')
                .ok_or_else(|| TextParseError::new(line, format!("malformed qualifier {extra:?}")))?;
            qualifiers.push((parse_uri(rel, line)?, parse_node(obj, line)?));
        } else {
            return Err(TextParseError::new(
                line,
                format!("unknown statement field {extra:?}"),
            ));
        }
    }

    if graph.statement(&uri).is_some() || graph.contains(&uri) {
        return Err(TextParseError::new(line, format!("duplicate uri {uri}")));
    }

    graph
        .insert_statement(Statement {
            uri,
            subject,
            predicate,
            object,
            scope,
            qualifiers,
        })
        .map_err(|e| TextParseError::new(line, e.to_string()))
}

fn unquote(value: &str, line: usize) -> Result<String, TextParseError> {
    match textenc::parse_quoted(value) {
        Some((s, used)) if used == value.len() => Ok(s),
        _ => Err(TextParseError::new(
            line,
            format!("expected quoted string, found {value:?}"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgraph::graph::TriplePattern;

    fn sample_graph() -> KnowledgeGraph {
        let mut g = KnowledgeGraph::new();
        let isa = g.relation_by_label("is_a").unwrap().clone();
        let vs = g
            .create_item("vector space", Some("a space\tof vectors"), None)
            .unwrap();
        let oc = g
            .create_item("orthocomplement", None, Some("\\mathbb{U}^\\perp"))
            .unwrap();
        g.set_item_provenance(&oc, 5).unwrap();
        let thm = g.create_item("complement theorem", None, None).unwrap();
        let scope = g.create_scope_item(&thm, ScopeKind::Assertion).unwrap();
        let s1 = g
            .assert_statement(&oc, &isa, Node::Entity(vs.clone()), Some(&scope), Vec::new())
            .unwrap();
        let src = g.relation_by_label("has_source_snippet").unwrap().clone();
        g.assert_statement(
            &s1,
            &src,
            Node::Literal(Literal::Int(5)),
            None,
            alloc::vec![(src.clone(), Node::Literal(Literal::Dec("0.50".into())))],
        )
        .unwrap();
        g
    }

    #[test]
    fn empty_graph_round_trip() {
        let g = KnowledgeGraph::new();
        let text = serialize(&g);
        assert!(text.starts_with("kgt 1\n"));
        let back = parse(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn fixture_round_trip_is_deep_equal() {
        let g = sample_graph();
        let text = serialize(&g);
        let back = parse(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.check_integrity(), Ok(()));
        // Allocation continues correctly after a round trip.
        let mut back = back;
        let next = back.create_item("fresh", None, None).unwrap();
        assert_eq!(next.sequence(), 5);
    }

    #[test]
    fn serialization_is_deterministic() {
        let g = sample_graph();
        assert_eq!(serialize(&g), serialize(&g));
    }

    #[test]
    fn undeclared_uri_is_named_in_error() {
        let text = "kgt 1\nS\tkb://main/S1\tkb://main/I7\tkb://main/R1\tlit:int:1\n";
        let err = parse(text).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("kb://main/I7"), "{}", err.message);
    }

    #[test]
    fn non_main_namespace_round_trips() {
        let mut g = KnowledgeGraph::with_namespace("alt").unwrap();
        g.create_item("x", None, None).unwrap();
        let back = parse(&serialize(&g)).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.namespace(), "alt");
    }

    #[test]
    fn parsed_graph_answers_queries() {
        let g = sample_graph();
        let back = parse(&serialize(&g)).unwrap();
        let all = back.query(&TriplePattern::default()).unwrap();
        assert_eq!(all.len(), g.statements().len());
    }

    #[test]
    fn rejects_bad_header_and_garbage() {
        assert!(parse("").is_err());
        assert!(parse("kgt 2\n").is_err());
        let err = parse("kgt 1\nX\tfoo\n").unwrap_err();
        assert_eq!(err.line, 2);
    }
}
