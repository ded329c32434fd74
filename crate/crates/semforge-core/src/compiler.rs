//! Compiles reviewed FNL documents into the knowledge graph.
//!
//! Snippet blocks are processed in id order and statements in document
//! order, so URI allocation is deterministic. Every item created here gets
//! the originating snippet as provenance plus a `has_source_snippet`
//! statement; theorem compounds become scope items with `has_scope` links.
//! Compilation is atomic: on error the target graph is left untouched.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::fnl::{codes, Diagnostic, FnlDocument, FnlStatement, StatementBody, Term};
use crate::kgraph::{
    normalize_label, normalize_notation, GraphError, KnowledgeGraph, Literal, Node, ScopeKind,
    Uri,
};

/// Identifier bindings of one compilation unit: normalized name to URI.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    map: BTreeMap<String, Uri>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&Uri> {
        self.map.get(name)
    }

    pub fn bind(&mut self, name: &str, uri: Uri) {
        self.map.insert(name.to_string(), uri);
    }
}

/// What a compilation run did.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompileReport {
    pub created_items: Vec<Uri>,
    pub created_relations: Vec<Uri>,
    pub created_scope_items: Vec<Uri>,
    pub asserted_statements: Vec<Uri>,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompileError {
    UnresolvedReference { term: String, line: usize },
    AmbiguousNotation { notation: String, line: usize },
    Recompiled { snippet: u64 },
    DuplicateScope { kind: ScopeKind, line: usize },
    EmptyScope { kind: ScopeKind, line: usize },
    ScopeKeywordMisuse { line: usize },
    Graph(GraphError),
}

impl fmt::Display for CompileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompileError::UnresolvedReference { term, line } => {
                write!(f, "line {line}: unresolved reference {term:?}")
            }
            CompileError::AmbiguousNotation { notation, line } => {
                write!(f, "line {line}: notation {notation:?} matches more than one entity")
            }
            CompileError::Recompiled { snippet } => {
                write!(f, "snippet {snippet} is already compiled into this graph")
            }
            CompileError::DuplicateScope { kind, line } => {
                write!(f, "line {line}: duplicate {kind} scope")
            }
            CompileError::EmptyScope { kind, line } => {
                write!(f, "line {line}: {kind} scope has no statements")
            }
            CompileError::ScopeKeywordMisuse { line } => {
                write!(f, "line {line}: scope keywords cannot be mixed with plain statements here")
            }
            CompileError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for CompileError {}

impl From<GraphError> for CompileError {
    fn from(e: GraphError) -> Self {
        CompileError::Graph(e)
    }
}

struct Ctx<'a> {
    graph: &'a mut KnowledgeGraph,
    bindings: &'a mut Bindings,
    report: &'a mut CompileReport,
    snippet: u64,
}

impl Ctx<'_> {
    fn relation(&mut self, keyword: &str) -> Result<Uri, CompileError> {
        if let Some(uri) = self.graph.relation_by_label(keyword) {
            return Ok(uri.clone());
        }
        let uri = self.graph.create_relation(keyword)?;
        self.report.created_relations.push(uri.clone());
        Ok(uri)
    }

    fn create_item(&mut self, label: &str, line: usize) -> Result<Uri, CompileError> {
        let uri = self.graph.create_item(label, None, None).map_err(|e| match e {
            GraphError::EmptyLabel | GraphError::InvalidLabel(_) => {
                CompileError::UnresolvedReference {
                    term: label.to_string(),
                    line,
                }
            }
            other => CompileError::Graph(other),
        })?;
        self.record_provenance(&uri)?;
        self.report.created_items.push(uri.clone());
        self.bindings.bind(&normalize_label(label), uri.clone());
        Ok(uri)
    }

    /// Sets the provenance field and asserts the matching queryable
    /// `has_source_snippet` statement.
    fn record_provenance(&mut self, uri: &Uri) -> Result<(), CompileError> {
        self.graph
            .set_item_provenance(uri, self.snippet)
            .expect("freshly created item");
        let source_rel = self.relation("has_source_snippet")?;
        let prov = self.graph.assert_statement(
            uri,
            &source_rel,
            Node::Literal(Literal::Int(self.snippet as i64)),
            None,
            Vec::new(),
        )?;
        self.report.asserted_statements.push(prov);
        Ok(())
    }

    /// Resolution order: unit bindings, exact label, normalized label,
    /// notation index (math terms). New terms create-and-bind; resolution
    /// failures are errors rather than silent creations.
    fn resolve(&mut self, term: &Term, line: usize) -> Result<Uri, CompileError> {
        match term {
            Term::NewTerm(label) => {
                let normalized = normalize_label(label);
                if let Some(uri) = self.bindings.get(&normalized) {
                    return Ok(uri.clone());
                }
                if let Some(uri) = self.graph.item_by_label(label) {
                    let uri = uri.clone();
                    self.report.warnings.push(Diagnostic::warning(
                        line,
                        1,
                        codes::DUPLICATE_STATEMENT,
                        format!("term {label:?} already exists; reusing {uri}"),
                    ));
                    self.bindings.bind(&normalized, uri.clone());
                    return Ok(uri);
                }
                self.create_item(label, line)
            }
            Term::Reference(ident) => {
                if let Some(uri) = self.bindings.get(ident) {
                    return Ok(uri.clone());
                }
                if let Some(uri) = self.graph.item_by_label(ident) {
                    return Ok(uri.clone());
                }
                match self.graph.items_by_normalized_label(ident) {
                    [single] => Ok(single.clone()),
                    [] => Err(CompileError::UnresolvedReference {
                        term: ident.clone(),
                        line,
                    }),
                    _ => Err(CompileError::UnresolvedReference {
                        term: format!("{ident} (ambiguous)"),
                        line,
                    }),
                }
            }
            Term::Math(notation) => {
                let key = normalize_notation(notation);
                if let Some(uri) = self.bindings.get(&key) {
                    return Ok(uri.clone());
                }
                match self.graph.items_by_notation(&key) {
                    [single] => Ok(single.clone()),
                    [] => Err(CompileError::UnresolvedReference {
                        term: format!("${notation}$"),
                        line,
                    }),
                    _ => Err(CompileError::AmbiguousNotation {
                        notation: notation.clone(),
                        line,
                    }),
                }
            }
            Term::Literal(_) => Err(CompileError::UnresolvedReference {
                term: "(literal)".to_string(),
                line,
            }),
        }
    }

    fn compile_statement(
        &mut self,
        stmt: &FnlStatement,
        scope: Option<&Uri>,
    ) -> Result<(), CompileError> {
        let StatementBody::Spo {
            subject,
            predicate,
            object,
        } = &stmt.body
        else {
            return Err(CompileError::ScopeKeywordMisuse {
                line: stmt.source_line,
            });
        };

        let has_scope_children = stmt.children.iter().any(FnlStatement::is_scope);
        if has_scope_children && !stmt.children.iter().all(FnlStatement::is_scope) {
            return Err(CompileError::ScopeKeywordMisuse {
                line: stmt.source_line,
            });
        }

        let subject_uri = self.resolve(subject, stmt.source_line)?;
        let predicate_uri = self.relation(predicate)?;
        // The object of has_notation is the notation itself (data), not a
        // reference to resolve; everywhere else math objects resolve through
        // the notation index.
        let registers_notation = predicate == "has_notation" && matches!(object, Term::Math(_));
        let object_node = match object {
            Term::Literal(l) => Node::Literal(l.clone()),
            Term::Math(n) if registers_notation => Node::Literal(Literal::Str(n.clone())),
            other => Node::Entity(self.resolve(other, stmt.source_line)?),
        };

        // Materialize notation and description onto items created in this
        // run; pre-existing entities are never mutated. The notation binding
        // itself is unit-local and therefore always recorded.
        let created_here = self.report.created_items.contains(&subject_uri);
        match (predicate.as_str(), object) {
            ("has_notation", Term::Math(n)) => {
                if created_here {
                    self.graph.set_item_notation(&subject_uri, n)?;
                }
                self.bindings
                    .bind(&normalize_notation(n), subject_uri.clone());
            }
            ("has_description", Term::Literal(Literal::Str(d))) if created_here => {
                self.graph.set_item_description(&subject_uri, d)?;
            }
            _ => {}
        }

        let statement_uri = self.graph.assert_statement(
            &subject_uri,
            &predicate_uri,
            object_node,
            scope,
            Vec::new(),
        )?;
        self.report.asserted_statements.push(statement_uri);

        if has_scope_children {
            self.compile_compound(stmt, &subject_uri)?;
        } else {
            for child in &stmt.children {
                self.compile_statement(child, scope)?;
            }
        }
        Ok(())
    }

    /// Compiles the scope children of a theorem-introducing statement.
    fn compile_compound(
        &mut self,
        stmt: &FnlStatement,
        theorem: &Uri,
    ) -> Result<(), CompileError> {
        let mut present: Vec<ScopeKind> = Vec::new();
        for child in &stmt.children {
            let StatementBody::Scope(kind) = child.body else {
                return Err(CompileError::ScopeKeywordMisuse {
                    line: child.source_line,
                });
            };
            if present.contains(&kind) {
                return Err(CompileError::DuplicateScope {
                    kind,
                    line: child.source_line,
                });
            }
            present.push(kind);
            if child.children.is_empty() {
                return Err(CompileError::EmptyScope {
                    kind,
                    line: child.source_line,
                });
            }

            let scope_uri = match self.graph.create_scope_item(theorem, kind) {
                Ok(uri) => uri,
                Err(GraphError::DuplicateScope(kind)) => {
                    return Err(CompileError::DuplicateScope {
                        kind,
                        line: child.source_line,
                    })
                }
                Err(e) => return Err(e.into()),
            };
            self.record_provenance(&scope_uri)?;
            self.report.created_scope_items.push(scope_uri.clone());
            let has_scope = self.relation("has_scope")?;
            let link = self.graph.assert_statement(
                theorem,
                &has_scope,
                Node::Entity(scope_uri.clone()),
                None,
                Vec::new(),
            )?;
            self.report.asserted_statements.push(link);

            for grandchild in &child.children {
                self.compile_statement(grandchild, Some(&scope_uri))?;
            }
        }
        if present.len() < ScopeKind::ALL.len() {
            let missing: Vec<&str> = ScopeKind::ALL
                .iter()
                .filter(|k| !present.contains(k))
                .map(|k| k.as_str())
                .collect();
            self.report.warnings.push(Diagnostic::warning(
                stmt.source_line,
                1,
                codes::EMPTY_SCOPE,
                format!("partial theorem compound: missing {}", missing.join(", ")),
            ));
        }
        Ok(())
    }
}

/// Compiles a document into `graph`. Blocks whose snippet id already has
/// provenance in the graph are rejected rather than duplicated.
pub fn compile(doc: &FnlDocument, graph: &mut KnowledgeGraph) -> Result<CompileReport, CompileError> {
    let mut scratch = graph.clone();
    let mut report = CompileReport::default();
    let mut bindings = Bindings::new();

    for (&snippet, statements) in &doc.blocks {
        if graph.has_provenance(snippet) {
            return Err(CompileError::Recompiled { snippet });
        }
        let mut ctx = Ctx {
            graph: &mut scratch,
            bindings: &mut bindings,
            report: &mut report,
            snippet,
        };
        for stmt in statements {
            ctx.compile_statement(stmt, None)?;
        }
    }

    *graph = scratch;
    Ok(report)
}

/// Resolves one term against a graph and bindings, creating (and binding)
/// an item when the term is a quoted new term. `snippet` becomes the
/// provenance of anything created.
pub fn resolve_term(
    term: &Term,
    graph: &mut KnowledgeGraph,
    bindings: &mut Bindings,
    snippet: u64,
) -> Result<Uri, CompileError> {
    let mut report = CompileReport::default();
    let mut ctx = Ctx {
        graph,
        bindings,
        report: &mut report,
        snippet,
    };
    ctx.resolve(term, 0)
}

/// Compiles a single theorem-introducing statement (whose children are scope
/// sections) into `graph`, returning the theorem item's URI and the run
/// report. Atomic like [`compile`].
pub fn compile_theorem_block(
    block: &FnlStatement,
    graph: &mut KnowledgeGraph,
    snippet: u64,
) -> Result<(Uri, CompileReport), CompileError> {
    if !block.children.iter().any(FnlStatement::is_scope) {
        return Err(CompileError::ScopeKeywordMisuse {
            line: block.source_line,
        });
    }
    let mut scratch = graph.clone();
    let mut report = CompileReport::default();
    let mut bindings = Bindings::new();
    let mut ctx = Ctx {
        graph: &mut scratch,
        bindings: &mut bindings,
        report: &mut report,
        snippet,
    };
    ctx.compile_statement(block, None)?;
    let StatementBody::Spo { subject, .. } = &block.body else {
        return Err(CompileError::ScopeKeywordMisuse {
            line: block.source_line,
        });
    };
    let theorem = ctx.resolve(subject, block.source_line)?;
    *graph = scratch;
    Ok((theorem, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnl::{parse_fnl, PredicateVocabulary};
    use crate::kgraph::TriplePattern;

    fn parse(text: &str) -> FnlDocument {
        let outcome = parse_fnl(text, &PredicateVocabulary::default_set());
        assert!(outcome.is_clean(), "{:?}", outcome.diagnostics);
        outcome.document
    }

    #[test]
    fn minimal_create_and_assert() {
        let mut g = KnowledgeGraph::new();
        g.create_item("dynamical system", None, None).unwrap();
        let before_items = g.entity_count();
        let doc = parse("- \"pendulum\" is_a: dynamical_system\n");
        let report = compile(&doc, &mut g).unwrap();
        assert_eq!(report.created_items.len(), 1);
        // The is_a statement plus the provenance statement.
        assert_eq!(report.asserted_statements.len(), 2);
        assert_eq!(g.entity_count(), before_items + 1);
        let uri = g.item_by_label("pendulum").unwrap().clone();
        assert_eq!(g.item(&uri).unwrap().provenance, Some(0));
    }

    #[test]
    fn unresolved_reference_is_an_error_and_atomic() {
        let mut g = KnowledgeGraph::new();
        let before = g.clone();
        let doc = parse("- \"known\" is_a: \"thing\"\n- known has_part: missing_term\n");
        let err = compile(&doc, &mut g).unwrap_err();
        assert!(matches!(
            err,
            CompileError::UnresolvedReference { ref term, line: 2 } if term == "missing_term"
        ));
        assert_eq!(g, before, "failed compile must not change the graph");
    }

    #[test]
    fn notation_registration_then_math_resolution() {
        let mut g = KnowledgeGraph::new();
        let doc = parse(
            "- \"orthocomplement\" is_a: \"concept\"\n- orthocomplement has_notation: $\\mathbb{U}^\\perp$\n- $\\mathbb{U}^\\perp$ has_description: \"set of orthogonal vectors\"\n",
        );
        compile(&doc, &mut g).unwrap();
        let oc = g.item_by_label("orthocomplement").unwrap().clone();
        assert_eq!(g.item(&oc).unwrap().notation.as_deref(), Some("\\mathbb{U}^\\perp"));
        assert_eq!(
            g.item(&oc).unwrap().description.as_deref(),
            Some("set of orthogonal vectors"),
            "math subject resolves through the notation index"
        );
        // Whitespace-insensitive lookup.
        assert_eq!(g.items_by_notation(&normalize_notation("\\mathbb{U}^\\perp ")), &[oc]);
    }

    #[test]
    fn new_term_binding_reused_within_unit() {
        let mut g = KnowledgeGraph::new();
        let doc = parse("- \"basis\" is_a: \"concept\"\n- \"basis\" has_description: \"family\"\n");
        let report = compile(&doc, &mut g).unwrap();
        // "basis" and "concept", not three items.
        assert_eq!(report.created_items.len(), 2);
    }

    #[test]
    fn theorem_compound_full() {
        let mut g = KnowledgeGraph::new();
        let doc = parse(
            "- \"main theorem\" is_a: \"theorem\"\n  - setup:\n    - \"space\" is_a: \"concept\"\n  - premise:\n    - \"candidate\" is_a: space\n  - assertion:\n    - candidate has_part: space\n",
        );
        let report = compile(&doc, &mut g).unwrap();
        assert_eq!(report.created_scope_items.len(), 3);
        let thm = g.item_by_label("main theorem").unwrap().clone();
        for kind in ScopeKind::ALL {
            let scope = g.scope_of(&thm, kind).expect("scope item exists");
            assert_eq!(g.scope_item(scope).unwrap().parent, thm);
        }
        // Scoped statements carry their scope URI.
        let premise = g.scope_of(&thm, ScopeKind::Premise).unwrap().clone();
        let scoped: Vec<_> = g
            .statements()
            .iter()
            .filter(|s| s.scope.as_ref() == Some(&premise))
            .collect();
        // candidate's is_a plus its provenance-free assert: the provenance
        // statement itself is unscoped, so exactly one scoped statement.
        assert_eq!(scoped.len(), 1);
        assert!(report.warnings.is_empty(), "full compound warns nothing");
        assert_eq!(g.check_integrity(), Ok(()));
    }

    #[test]
    fn theorem_compound_partial_warns() {
        let mut g = KnowledgeGraph::new();
        let doc = parse(
            "- \"small theorem\" is_a: \"theorem\"\n  - assertion:\n    - \"thing\" is_a: \"concept\"\n",
        );
        let report = compile(&doc, &mut g).unwrap();
        assert_eq!(report.created_scope_items.len(), 1);
        assert_eq!(report.warnings.len(), 1);
        assert!(report.warnings[0].message.contains("setup, premise"));
    }

    #[test]
    fn duplicate_and_empty_scopes_rejected() {
        let mut g = KnowledgeGraph::new();
        let dup = parse(
            "- \"t\" is_a: \"theorem\"\n  - premise:\n    - \"a\" is_a: \"c\"\n  - premise:\n    - \"b\" is_a: \"c\"\n",
        );
        assert!(matches!(
            compile(&dup, &mut g),
            Err(CompileError::DuplicateScope {
                kind: ScopeKind::Premise,
                ..
            })
        ));
        let empty = parse("- \"t\" is_a: \"theorem\"\n  - premise:\n");
        assert!(matches!(
            compile(&empty, &mut g),
            Err(CompileError::EmptyScope {
                kind: ScopeKind::Premise,
                ..
            })
        ));
    }

    #[test]
    fn recompilation_guard() {
        let mut g = KnowledgeGraph::new();
        let doc = parse("## snippet 4\n- \"fresh\" is_a: \"thing\"\n");
        compile(&doc, &mut g).unwrap();
        assert_eq!(
            compile(&doc, &mut g),
            Err(CompileError::Recompiled { snippet: 4 })
        );
    }

    #[test]
    fn compile_is_deterministic_and_conservative() {
        let build = || {
            let mut g = KnowledgeGraph::new();
            g.create_item("seed", Some("pre-existing"), None).unwrap();
            g
        };
        let doc = parse("## snippet 2\n- \"a\" is_a: \"b\"\n- a has_description: \"text\"\n");
        let mut g1 = build();
        let mut g2 = build();
        compile(&doc, &mut g1).unwrap();
        compile(&doc, &mut g2).unwrap();
        assert_eq!(g1, g2, "equal inputs give equal graphs and URIs");
        // Pre-existing entities are untouched.
        let seed = g1.item_by_label("seed").unwrap().clone();
        assert_eq!(g1.item(&seed).unwrap().description.as_deref(), Some("pre-existing"));
        assert_eq!(g1.item(&seed).unwrap().provenance, None);
    }

    #[test]
    fn provenance_statements_recoverable_by_query() {
        let mut g = KnowledgeGraph::new();
        let doc = parse("## snippet 7\n- \"x\" is_a: \"y\"\n");
        compile(&doc, &mut g).unwrap();
        let source = g.relation_by_label("has_source_snippet").unwrap().clone();
        let hits = g
            .query(&TriplePattern {
                subject: None,
                predicate: Some(source),
                object: Some(Node::Literal(Literal::Int(7))),
            })
            .unwrap();
        assert_eq!(hits.len(), 2, "both created items trace to snippet 7");
    }

    #[test]
    fn description_on_existing_item_asserts_but_does_not_mutate() {
        let mut g = KnowledgeGraph::new();
        g.create_item("vector space", Some("original"), None).unwrap();
        let doc = parse("- vector_space has_description: \"overwritten?\"\n");
        compile(&doc, &mut g).unwrap();
        let vs = g.item_by_label("vector space").unwrap().clone();
        assert_eq!(g.item(&vs).unwrap().description.as_deref(), Some("original"));
        // The statement itself is still recorded.
        assert_eq!(g.statements().len(), 1);
    }

    #[test]
    fn public_resolve_term_creates_and_binds() {
        let mut g = KnowledgeGraph::new();
        let mut bindings = Bindings::new();
        let uri = resolve_term(
            &Term::NewTerm("orthocomplement".into()),
            &mut g,
            &mut bindings,
            3,
        )
        .unwrap();
        assert_eq!(g.item(&uri).unwrap().provenance, Some(3));
        let again = resolve_term(
            &Term::Reference("orthocomplement".into()),
            &mut g,
            &mut bindings,
            3,
        )
        .unwrap();
        assert_eq!(uri, again);
        assert!(resolve_term(&Term::Reference("foo".into()), &mut g, &mut bindings, 3).is_err());
    }

    #[test]
    fn public_compile_theorem_block() {
        let mut g = KnowledgeGraph::new();
        let doc = parse("- \"t\" is_a: \"theorem\"\n  - assertion:\n    - \"c\" is_a: \"d\"\n");
        let block = &doc.blocks[&0][0];
        let (thm, report) = compile_theorem_block(block, &mut g, 9).unwrap();
        assert_eq!(g.item(&thm).unwrap().label, "t");
        assert_eq!(report.created_scope_items.len(), 1);
        // A plain statement without scope children is rejected.
        let plain = parse("- \"x\" is_a: \"y\"\n");
        assert!(matches!(
            compile_theorem_block(&plain.blocks[&0][0], &mut g, 9),
            Err(CompileError::ScopeKeywordMisuse { .. })
        ));
    }
}
