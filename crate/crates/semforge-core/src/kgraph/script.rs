//! The `.kgb` builder-script export.
//!
//! A deterministic imperative script that records how to rebuild the graph:
//! one creation directive per entity (in URI order, so items precede
//! relations and every referenced entity is created before use) followed by
//! one `assert` directive per statement. URIs in the graph's own namespace
//! are written in short form (`I3`); foreign URIs keep the full form.
//!
//! ```text
//! kgb 1
//! ns main
//! item I1 "vector space" desc="..." source=2
//! scope I4 "thm (premise)" parent=I3 kind=premise
//! relation R1 "is_a" builtin
//! assert S1 I2 R1 I1 scope=I4 q:R4=lit:str:"x"
//! ```

use alloc::string::{String, ToString};

use super::entity::Entity;
use super::graph::KnowledgeGraph;
use super::statement::Node;
use super::uri::Uri;
use crate::textenc;

pub const SCRIPT_HEADER: &str = "kgb 1";

fn uri_text(uri: &Uri, graph: &KnowledgeGraph) -> String {
    if uri.namespace() == graph.namespace() {
        uri.short()
    } else {
        uri.to_string()
    }
}

fn node_script_text(node: &Node, graph: &KnowledgeGraph) -> String {
    match node {
        Node::Entity(u) => uri_text(u, graph),
        Node::Literal(l) => l.encode(),
    }
}

/// Renders the builder script. Total on valid graphs and byte-stable across
/// repeated calls.
pub fn export_builder_script(graph: &KnowledgeGraph) -> String {
    let mut out = String::new();
    out.push_str(SCRIPT_HEADER);
    out.push('\n');
    out.push_str("ns ");
    out.push_str(graph.namespace());
    out.push('\n');
    for (uri, entity) in graph.entities() {
        match entity {
            Entity::Item(item) => {
                out.push_str("item ");
                out.push_str(&uri_text(uri, graph));
                out.push(' ');
                out.push_str(&textenc::quote(&item.label));
                if let Some(desc) = &item.description {
                    out.push_str(" desc=");
                    out.push_str(&textenc::quote(desc));
                }
                if let Some(notation) = &item.notation {
                    out.push_str(" notation=");
                    out.push_str(&textenc::quote(notation));
                }
                if let Some(prov) = item.provenance {
                    out.push_str(" source=");
                    out.push_str(&prov.to_string());
                }
                out.push('\n');
            }
            Entity::Scope(scope) => {
                out.push_str("scope ");
                out.push_str(&uri_text(uri, graph));
                out.push(' ');
                out.push_str(&textenc::quote(&scope.item.label));
                out.push_str(" parent=");
                out.push_str(&uri_text(&scope.parent, graph));
                out.push_str(" kind=");
                out.push_str(scope.kind.as_str());
                if let Some(prov) = scope.item.provenance {
                    out.push_str(" source=");
                    out.push_str(&prov.to_string());
                }
                out.push('\n');
            }
            Entity::Relation(rel) => {
                out.push_str("relation ");
                out.push_str(&uri_text(uri, graph));
                out.push(' ');
                out.push_str(&textenc::quote(&rel.label));
                if rel.builtin {
                    out.push_str(" builtin");
                }
                out.push('\n');
            }
        }
    }
    for st in graph.statements() {
        out.push_str("assert ");
        out.push_str(&uri_text(&st.uri, graph));
        out.push(' ');
        out.push_str(&uri_text(&st.subject, graph));
        out.push(' ');
        out.push_str(&uri_text(&st.predicate, graph));
        out.push(' ');
        out.push_str(&node_script_text(&st.object, graph));
        if let Some(scope) = &st.scope {
            out.push_str(" scope=");
            out.push_str(&uri_text(scope, graph));
        }
        for (rel, obj) in &st.qualifiers {
            out.push_str(" q:");
            out.push_str(&uri_text(rel, graph));
            out.push('=');
            out.push_str(&node_script_text(obj, graph));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgraph::graph::BUILTIN_RELATIONS;
    use alloc::vec::Vec;

    #[test]
    fn empty_graph_exports_preamble_and_builtins_only() {
        let g = KnowledgeGraph::new();
        let script = export_builder_script(&g);
        let lines: Vec<&str> = script.lines().collect();
        assert_eq!(lines[0], "kgb 1");
        assert_eq!(lines[1], "ns main");
        assert_eq!(lines.len(), 2 + BUILTIN_RELATIONS.len());
        assert!(lines[2..].iter().all(|l| l.starts_with("relation ")));
    }

    #[test]
    fn single_item_exports_single_item_directive() {
        let mut g = KnowledgeGraph::new();
        g.create_item("pendulum", None, None).unwrap();
        let script = export_builder_script(&g);
        let item_lines: Vec<&str> = script.lines().filter(|l| l.starts_with("item ")).collect();
        assert_eq!(item_lines, ["item I1 \"pendulum\""]);
    }

    #[test]
    fn export_is_byte_identical_across_runs() {
        let mut g = KnowledgeGraph::new();
        let isa = g.relation_by_label("is_a").unwrap().clone();
        let a = g.create_item("a", Some("first"), None).unwrap();
        let b = g.create_item("b", None, Some("\\beta")).unwrap();
        g.assert_statement(&a, &isa, Node::Entity(b), None, Vec::new())
            .unwrap();
        assert_eq!(export_builder_script(&g), export_builder_script(&g));
    }
}
