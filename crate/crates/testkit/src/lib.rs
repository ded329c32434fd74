//! Shared test machinery: seeded random generators for graphs, FNL
//! documents and delimited LaTeX sources, plus independent oracles used by
//! the acceptance suite.
//!
//! The oracles deliberately do not call the code paths they check: the
//! query oracle is a plain filter over the statement list, and the
//! occurrence oracle re-implements the matching rules (word boundaries,
//! math regions, longest-match-first) from scratch.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use semforge_core::fnl::{FnlDocument, FnlStatement, StatementBody, Term};
use semforge_core::kgraph::{
    Entity, EntityKind, KnowledgeGraph, Literal, Node, ScopeKind, Statement, TriplePattern, Uri,
};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

// ----- random graphs -----

fn random_word(rng: &mut StdRng) -> String {
    let len = rng.gen_range(3..10);
    (0..len)
        .map(|_| (b'a' + rng.gen_range(0..26)) as char)
        .collect()
}

fn random_label(rng: &mut StdRng, salt: usize) -> String {
    let words = rng.gen_range(1..4);
    let mut label = (0..words).map(|_| random_word(rng)).collect::<Vec<_>>().join(" ");
    label.push_str(&format!(" {salt}"));
    label
}

fn random_literal(rng: &mut StdRng) -> Literal {
    match rng.gen_range(0..4) {
        0 => Literal::Int(rng.gen_range(-1000..1000)),
        1 => Literal::Dec(format!("{}.{:03}", rng.gen_range(0..100), rng.gen_range(0..1000))),
        2 => Literal::Str(format!("text with \"quotes\"\tand tab {}", rng.gen_range(0..100))),
        _ => Literal::Str(random_word(rng)),
    }
}

/// Builds a random graph through the public mutation API only, so every
/// generated graph is reachable in production. Statement count is capped by
/// `max_statements`.
pub fn random_graph(rng: &mut StdRng, max_statements: usize) -> KnowledgeGraph {
    let mut g = KnowledgeGraph::new();
    let n_items = rng.gen_range(1..30);
    let mut items: Vec<Uri> = Vec::new();
    for i in 0..n_items {
        let label = random_label(rng, i);
        let description = rng
            .gen_bool(0.4)
            .then(|| format!("description of {label}"));
        let notation = rng
            .gen_bool(0.25)
            .then(|| format!("\\mathcal{{{}}}_{{{i}}}", random_word(rng)));
        let uri = g
            .create_item(&label, description.as_deref(), notation.as_deref())
            .expect("generated labels are unique");
        if rng.gen_bool(0.5) {
            g.set_item_provenance(&uri, rng.gen_range(1..20)).unwrap();
        }
        items.push(uri);
    }

    let mut relations: Vec<Uri> = semforge_core::kgraph::BUILTIN_RELATIONS
        .iter()
        .map(|l| g.relation_by_label(l).unwrap().clone())
        .collect();
    for i in 0..rng.gen_range(0..4) {
        relations.push(g.create_relation(&format!("rel_{i}_{}", random_word(rng))).unwrap());
    }

    let mut scopes: Vec<Uri> = Vec::new();
    for _ in 0..rng.gen_range(0..4) {
        let parent = &items[rng.gen_range(0..items.len())];
        let kind = ScopeKind::ALL[rng.gen_range(0..3)];
        if let Ok(scope) = g.create_scope_item(parent, kind) {
            scopes.push(scope);
        }
    }

    let n_statements = rng.gen_range(0..=max_statements);
    let mut statements: Vec<Uri> = Vec::new();
    for _ in 0..n_statements {
        let subject = if !statements.is_empty() && rng.gen_bool(0.2) {
            statements[rng.gen_range(0..statements.len())].clone()
        } else {
            items[rng.gen_range(0..items.len())].clone()
        };
        let predicate = relations[rng.gen_range(0..relations.len())].clone();
        let object = match rng.gen_range(0..4) {
            0 => Node::Literal(random_literal(rng)),
            1 if !statements.is_empty() => {
                Node::Entity(statements[rng.gen_range(0..statements.len())].clone())
            }
            _ => Node::Entity(items[rng.gen_range(0..items.len())].clone()),
        };
        let scope = (!scopes.is_empty() && rng.gen_bool(0.2))
            .then(|| scopes[rng.gen_range(0..scopes.len())].clone());
        let mut qualifiers = Vec::new();
        for _ in 0..rng.gen_range(0..3usize) {
            let rel = relations[rng.gen_range(0..relations.len())].clone();
            let obj = if rng.gen_bool(0.5) {
                Node::Literal(random_literal(rng))
            } else {
                Node::Entity(items[rng.gen_range(0..items.len())].clone())
            };
            qualifiers.push((rel, obj));
        }
        let uri = g
            .assert_statement(&subject, &predicate, object, scope.as_ref(), qualifiers)
            .expect("generated references are valid");
        statements.push(uri);
    }
    g
}

/// A random triple pattern over the graph's own URIs; across draws this
/// covers all eight bound/unbound shapes.
pub fn random_pattern(rng: &mut StdRng, g: &KnowledgeGraph) -> TriplePattern {
    let items: Vec<Uri> = g
        .entities()
        .filter(|(_, e)| matches!(e, Entity::Item(_) | Entity::Scope(_)))
        .map(|(u, _)| u.clone())
        .collect();
    let relations: Vec<Uri> = g
        .entities()
        .filter(|(_, e)| matches!(e, Entity::Relation(_)))
        .map(|(u, _)| u.clone())
        .collect();
    let statements: Vec<&Statement> = g.statements().iter().collect();

    let subject = rng.gen_bool(0.5).then(|| {
        if !statements.is_empty() && rng.gen_bool(0.3) {
            statements[rng.gen_range(0..statements.len())].subject.clone()
        } else {
            items[rng.gen_range(0..items.len())].clone()
        }
    });
    let predicate = rng
        .gen_bool(0.5)
        .then(|| relations[rng.gen_range(0..relations.len())].clone());
    let object = rng.gen_bool(0.5).then(|| {
        if !statements.is_empty() && rng.gen_bool(0.6) {
            statements[rng.gen_range(0..statements.len())].object.clone()
        } else {
            Node::Entity(items[rng.gen_range(0..items.len())].clone())
        }
    });
    TriplePattern {
        subject,
        predicate,
        object,
    }
}

/// Brute-force query oracle: a linear filter over the statement list.
pub fn query_oracle(g: &KnowledgeGraph, pattern: &TriplePattern) -> Vec<Statement> {
    g.statements()
        .iter()
        .filter(|st| {
            pattern.subject.as_ref().is_none_or(|s| &st.subject == s)
                && pattern.predicate.as_ref().is_none_or(|p| &st.predicate == p)
                && pattern.object.as_ref().is_none_or(|o| &st.object == o)
        })
        .cloned()
        .collect()
}

// ----- random FNL documents -----

fn random_ident(rng: &mut StdRng) -> String {
    let mut s = random_word(rng);
    if rng.gen_bool(0.4) {
        s.push('_');
        s.push_str(&random_word(rng));
    }
    s
}

fn random_entity_term(rng: &mut StdRng) -> Term {
    match rng.gen_range(0..3) {
        0 => Term::Reference(random_ident(rng)),
        1 => Term::NewTerm(format!("{} {}", random_word(rng), random_word(rng))),
        _ => Term::Math(format!("\\mathbb{{{}}}", random_word(rng).to_uppercase())),
    }
}

fn random_statement(rng: &mut StdRng, depth: usize, line: &mut usize) -> FnlStatement {
    *line += 1;
    let (predicate, object) = match rng.gen_range(0..4) {
        0 => ("is_a", random_entity_term(rng)),
        1 => ("subclass_of", Term::Reference(random_ident(rng))),
        2 => (
            "has_description",
            Term::Literal(Literal::Str(format!("about {}", random_word(rng)))),
        ),
        _ => ("has_part", random_entity_term(rng)),
    };
    let mut stmt = FnlStatement {
        body: StatementBody::Spo {
            subject: if rng.gen_bool(0.5) {
                Term::Reference(random_ident(rng))
            } else {
                Term::NewTerm(format!("{} {}", random_word(rng), random_word(rng)))
            },
            predicate: predicate.to_string(),
            object,
        },
        depth,
        source_line: *line,
        children: Vec::new(),
    };
    if depth == 0 && rng.gen_bool(0.25) {
        let mut kinds = vec![ScopeKind::Setup, ScopeKind::Premise, ScopeKind::Assertion];
        let keep = rng.gen_range(1..=3);
        kinds.truncate(keep);
        for kind in kinds {
            *line += 1;
            let mut scope = FnlStatement {
                body: StatementBody::Scope(kind),
                depth: depth + 1,
                source_line: *line,
                children: Vec::new(),
            };
            for _ in 0..rng.gen_range(1..3) {
                scope.children.push(random_statement(rng, depth + 2, line));
            }
            stmt.children.push(scope);
        }
    } else if depth < 2 && rng.gen_bool(0.2) {
        for _ in 0..rng.gen_range(1..3) {
            stmt.children.push(random_statement(rng, depth + 1, line));
        }
    }
    stmt
}

/// A random FNL document with up to `max_blocks` snippet blocks.
pub fn random_fnl_document(rng: &mut StdRng, max_blocks: usize) -> FnlDocument {
    let mut doc = FnlDocument::default();
    let blocks = rng.gen_range(1..=max_blocks);
    let mut line = 0usize;
    let mut id = 0u64;
    for _ in 0..blocks {
        id += rng.gen_range(1..4);
        let mut statements = Vec::new();
        for _ in 0..rng.gen_range(1..8) {
            statements.push(random_statement(rng, 0, &mut line));
        }
        doc.set_block(id, statements);
    }
    doc
}

// ----- random delimited LaTeX -----

/// A random snippet-delimited LaTeX source that `split_document` accepts.
pub fn random_delimited_latex(rng: &mut StdRng) -> String {
    let mut out = String::new();
    if rng.gen_bool(0.7) {
        out.push_str("\\documentclass{article}\n\\title{Generated}\n\\begin{document}\n");
    }
    let snippets = rng.gen_range(1..8);
    let mut id = 0u64;
    for _ in 0..snippets {
        id += rng.gen_range(1..5);
        let spaces = if rng.gen_bool(0.3) { "  " } else { " " };
        out.push_str(&format!("%{spaces}!snippet {id}\n"));
        for _ in 0..rng.gen_range(1..4) {
            match rng.gen_range(0..5) {
                0 => out.push_str(&format!("Plain prose about {}.\n", random_word(rng))),
                1 => out.push_str(&format!("Math like ${}_i$ inline.\n", random_word(rng))),
                2 => out.push_str(&format!("% a comment about {}\n", random_word(rng))),
                3 => out.push_str(&format!("\\textbf{{{}}} emphasis.\n", random_word(rng))),
                _ => out.push_str(&format!(
                    "Numbers {} and {}.\n",
                    rng.gen_range(0..100),
                    rng.gen_range(0..100)
                )),
            }
        }
    }
    if rng.gen_bool(0.5) {
        out.push_str("\\end{document}\n");
    }
    if rng.gen_bool(0.3) {
        out.pop(); // sometimes no trailing newline
    }
    out
}

/// Random noise for the parser fuzz property: printable-ish lines with FNL
/// shrapnel mixed in.
pub fn random_fnl_noise(rng: &mut StdRng) -> String {
    let pieces = [
        "- ", "-", "## snippet ", "#", "\"", "$", ":", "is_a", "premise", "  ", "\t", "\\", "{",
        "}", "\n", "x", "42", "3.14", "\u{1F600}", "\u{0}", "lit:", "kb://main/I1",
    ];
    let mut out = String::new();
    for _ in 0..rng.gen_range(0..120) {
        out.push_str(pieces[rng.gen_range(0..pieces.len())]);
    }
    out
}

// ----- occurrence oracle -----

/// Entity data the occurrence oracle works from.
#[derive(Debug, Clone)]
pub struct OracleEntity {
    pub uri: Uri,
    pub label: String,
    pub notation: Option<String>,
    pub defined_in: u64,
}

/// Extracts oracle entities from a graph: plain items with provenance.
pub fn oracle_entities(g: &KnowledgeGraph) -> Vec<OracleEntity> {
    let mut out = Vec::new();
    for (uri, entity) in g.entities() {
        if uri.kind() != EntityKind::Item {
            continue;
        }
        if let Entity::Item(item) = entity {
            if let Some(defined_in) = item.provenance {
                out.push(OracleEntity {
                    uri: uri.clone(),
                    label: item.label.clone(),
                    notation: item.notation.clone(),
                    defined_in,
                });
            }
        }
    }
    out
}

/// Character classification for the oracle's own scanner. Math bytes carry
/// the id of their formula so matches never straddle two formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Zone {
    Text,
    Math(u32),
    Comment,
}

impl Zone {
    fn is_math(self) -> bool {
        matches!(self, Zone::Math(_))
    }
}

/// Labels every byte of the body as text, math or comment. Independent,
/// deliberately simple state machine.
fn zone_map(body: &str) -> Vec<Zone> {
    let bytes = body.as_bytes();
    let mut zones = vec![Zone::Text; bytes.len()];
    let mut i = 0usize;
    let mut in_math = false;
    let mut math_id = 0u32;
    let mut math_closer: &[u8] = b"";
    let mut in_comment = false;
    while i < bytes.len() {
        if in_comment {
            if bytes[i] == b'\n' {
                in_comment = false;
            } else {
                zones[i] = Zone::Comment;
            }
            i += 1;
            continue;
        }
        if in_math {
            if bytes[i] == b'\\' && math_closer.len() == 1 && i + 1 < bytes.len() {
                zones[i] = Zone::Math(math_id);
                zones[i + 1] = Zone::Math(math_id);
                i += 2;
                continue;
            }
            if i + math_closer.len() <= bytes.len()
                && &bytes[i..i + math_closer.len()] == math_closer
            {
                for k in 0..math_closer.len() {
                    zones[i + k] = Zone::Math(math_id);
                }
                in_math = false;
                i += math_closer.len();
                continue;
            }
            zones[i] = Zone::Math(math_id);
            i += 1;
            continue;
        }
        if bytes[i] == b'\\' && i + 1 < bytes.len() {
            if bytes[i + 1] == b'(' || bytes[i + 1] == b'[' {
                math_id += 1;
                zones[i] = Zone::Math(math_id);
                zones[i + 1] = Zone::Math(math_id);
                math_closer = if bytes[i + 1] == b'(' { b"\\)" } else { b"\\]" };
                in_math = true;
                i += 2;
                continue;
            }
            i += 2;
            continue;
        }
        if bytes[i] == b'$' {
            let two = i + 1 < bytes.len() && bytes[i + 1] == b'$';
            math_closer = if two { b"$$" } else { b"$" };
            math_id += 1;
            zones[i] = Zone::Math(math_id);
            if two {
                zones[i + 1] = Zone::Math(math_id);
            }
            in_math = true;
            i += if two { 2 } else { 1 };
            continue;
        }
        if bytes[i] == b'%' {
            in_comment = true;
            zones[i] = Zone::Comment;
            i += 1;
            continue;
        }
        i += 1;
    }
    zones
}

fn word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// All candidate matches of an entity in one snippet body.
fn oracle_candidates(body: &str, zones: &[Zone], entity: &OracleEntity) -> Vec<(usize, usize)> {
    let mut hits = Vec::new();
    // Label: word-boundary matches fully inside text zones.
    let label = &entity.label;
    if !label.is_empty() {
        let mut from = 0usize;
        while let Some(pos) = body[from..].find(label.as_str()) {
            let start = from + pos;
            let end = start + label.len();
            let in_text = (start..end).all(|i| zones[i] == Zone::Text);
            let before_ok = body[..start].chars().next_back().is_none_or(|c| !word_char(c));
            let after_ok = body[end..].chars().next().is_none_or(|c| !word_char(c));
            if in_text && before_ok && after_ok {
                hits.push((start, end));
            }
            from = start + label.chars().next().map_or(1, char::len_utf8);
        }
    }
    // Notation: whitespace-stripped substring inside math zones. Every
    // matched byte must belong to the same formula.
    if let Some(notation) = &entity.notation {
        let needle: String = notation.chars().filter(|c| !c.is_whitespace()).collect();
        if !needle.is_empty() {
            let mut stripped = String::new();
            let mut offsets: Vec<usize> = Vec::new();
            for (i, c) in body.char_indices() {
                if zones[i].is_math() && !c.is_whitespace() && c != '$' {
                    stripped.push(c);
                    offsets.push(i);
                }
            }
            let needle_chars = needle.chars().count();
            let mut from = 0usize;
            while let Some(pos) = stripped[from..].find(needle.as_str()) {
                let char_start = stripped[..from + pos].chars().count();
                let start = offsets[char_start];
                let last = offsets[char_start + needle_chars - 1];
                let same_formula = zones[start] == zones[last]
                    && (start..last).all(|i| zones[i] == zones[start]);
                if same_formula {
                    let last_len = body[last..].chars().next().map_or(1, char::len_utf8);
                    hits.push((start, last + last_len));
                }
                from += pos + needle.chars().next().map_or(1, char::len_utf8);
            }
        }
    }
    hits
}

/// Independent occurrence scan over `(id, body)` snippets. Applies the
/// documented rules: definition-onward only, longest-match-first overlap
/// resolution, ties by start then URI. Returns `(snippet, start, end, uri)`
/// rows sorted by snippet and span.
pub fn occurrence_oracle(
    snippets: &[(u64, &str)],
    entities: &[OracleEntity],
) -> Vec<(u64, usize, usize, Uri)> {
    let mut all = Vec::new();
    for (id, body) in snippets {
        let zones = zone_map(body);
        let mut candidates: Vec<(usize, usize, Uri)> = Vec::new();
        for entity in entities {
            if *id < entity.defined_in {
                continue;
            }
            for (start, end) in oracle_candidates(body, &zones, entity) {
                candidates.push((start, end, entity.uri.clone()));
            }
        }
        candidates.sort_by(|a, b| {
            (b.1 - b.0)
                .cmp(&(a.1 - a.0))
                .then(a.0.cmp(&b.0))
                .then(a.2.cmp(&b.2))
        });
        let mut taken: Vec<(usize, usize, Uri)> = Vec::new();
        for (start, end, uri) in candidates {
            if !taken.iter().any(|(s, e, _)| start < *e && *s < end) {
                taken.push((start, end, uri));
            }
        }
        taken.sort_by_key(|(s, _, _)| *s);
        for (start, end, uri) in taken {
            all.push((*id, start, end, uri));
        }
    }
    all
}

// ----- semantic layer strip -----

const ANCHOR_OPEN: &str = "<span class=\"sem-anchor\">";
const TOOLTIP_OPEN: &str = "<div class=\"tooltip\">";
const TOOLTIP_CLOSE: &str = "</div></span>";

/// Removes every anchor and its embedded tooltip, keeping the anchored text.
/// Returns `None` if the markup does not have the expected shape.
pub fn strip_semantic_layer(html: &str) -> Option<String> {
    let mut out = html.to_string();
    loop {
        let Some(start) = out.find(ANCHOR_OPEN) else {
            return Some(out);
        };
        let tooltip_start = start + out[start..].find(TOOLTIP_OPEN)?;
        let tooltip_end = tooltip_start + out[tooltip_start..].find(TOOLTIP_CLOSE)?;
        let anchored_text = out[start + ANCHOR_OPEN.len()..tooltip_start].to_string();
        out.replace_range(start..tooltip_end + TOOLTIP_CLOSE.len(), &anchored_text);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_graphs_are_valid() {
        let mut r = rng(7);
        for _ in 0..10 {
            let g = random_graph(&mut r, 100);
            assert_eq!(g.check_integrity(), Ok(()));
        }
    }

    #[test]
    fn generators_are_deterministic_per_seed() {
        let a = random_graph(&mut rng(42), 50);
        let b = random_graph(&mut rng(42), 50);
        assert_eq!(a, b);
        assert_eq!(
            random_fnl_document(&mut rng(3), 4),
            random_fnl_document(&mut rng(3), 4)
        );
        assert_eq!(
            random_delimited_latex(&mut rng(9)),
            random_delimited_latex(&mut rng(9))
        );
    }

    #[test]
    fn zone_map_distinguishes_math_text_comment() {
        let body = "word $m$ % c\nw";
        let zones = zone_map(body);
        assert_eq!(zones[0], Zone::Text);
        assert_eq!(zones[6], Zone::Math(1));
        assert_eq!(zones[9], Zone::Comment);
        assert_eq!(zones[13], Zone::Text);
        // Adjacent formulas get distinct ids.
        let zones = zone_map("$a$$b$");
        assert_eq!(zones[1], Zone::Math(1));
        assert_eq!(zones[4], Zone::Math(2));
    }

    #[test]
    fn oracle_notation_never_straddles_formulas() {
        let entities = vec![OracleEntity {
            uri: "kb://main/I1".parse().unwrap(),
            label: "never in prose".into(),
            notation: Some("ab".into()),
            defined_in: 1,
        }];
        // "a" and "b" live in adjacent but distinct formulas.
        let rows = occurrence_oracle(&[(1, "$a$$b$")], &entities);
        assert!(rows.is_empty(), "{rows:?}");
        let rows = occurrence_oracle(&[(1, "$ab$")], &entities);
        assert_eq!(rows.len(), 1);
    }

    #[test]
    fn strip_round_trips_plain_html() {
        let html = "<p>no anchors here</p>";
        assert_eq!(strip_semantic_layer(html).unwrap(), html);
        let anchored =
            "<p>a <span class=\"sem-anchor\">term<div class=\"tooltip\">x</div></span> b</p>";
        assert_eq!(strip_semantic_layer(anchored).unwrap(), "<p>a term b</p>");
    }
}
