//! Tooltip content: the explanation payload attached to each occurrence.
//!
//! Base content comes straight from the graph (label, classification via
//! `is_a`, description, notation, defining snippet). An optional refiner —
//! implemented by the LLM client in the companion crate — may add a
//! polished explanation; refiner failures degrade to base content with a
//! warning, never to an error.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::kgraph::{Entity, GraphError, KnowledgeGraph, Node, Uri};

/// Explanation payload for one entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TooltipSpec {
    pub entity: Uri,
    pub title: String,
    /// Classification text, from the entity's first `is_a` statement.
    pub kind: String,
    pub body: String,
    pub notation: Option<String>,
    /// Defining snippet id (0 when unknown).
    pub source: u64,
    pub refined_body: Option<String>,
}

/// Supplies LLM-refined explanation text. Implementations live outside this
/// crate; errors are reported as plain strings and downgrade to warnings.
pub trait TooltipRefiner {
    fn refine(&self, entity: &Uri, prompt: &str) -> Result<String, String>;
}

/// Deterministic prompt for tooltip refinement; also the cache key input.
pub fn refinement_prompt(spec: &TooltipSpec) -> String {
    let mut prompt = String::new();
    prompt.push_str("Explain the term \"");
    prompt.push_str(&spec.title);
    prompt.push_str("\" (a ");
    prompt.push_str(&spec.kind);
    prompt.push_str(") to a reader of a mathematical text in at most two sentences.\n");
    prompt.push_str("Known description: ");
    prompt.push_str(&spec.body);
    prompt.push('\n');
    if let Some(notation) = &spec.notation {
        prompt.push_str("Notation: $");
        prompt.push_str(notation);
        prompt.push_str("$\n");
    }
    prompt.push_str("Answer with the explanation only.\n");
    prompt
}

/// Builds the tooltip content for `entity`. With a refiner, the refined body
/// is requested through it; refiner errors are returned as warnings.
pub fn generate_tooltip_content(
    entity: &Uri,
    graph: &KnowledgeGraph,
    refiner: Option<&dyn TooltipRefiner>,
) -> Result<(TooltipSpec, Vec<String>), GraphError> {
    let item = match graph.entity(entity) {
        Some(e) => e.as_item().ok_or_else(|| GraphError::NotAnItem(entity.clone()))?,
        None => return Err(GraphError::UnknownEntity(entity.clone())),
    };

    let kind = graph
        .statements()
        .iter()
        .find(|s| {
            &s.subject == entity
                && graph
                    .relation(&s.predicate)
                    .is_some_and(|r| r.label == "is_a")
        })
        .and_then(|s| match &s.object {
            Node::Entity(uri) => graph.entity(uri).map(Entity::label),
            Node::Literal(_) => None,
        })
        .unwrap_or("term")
        .to_string();

    let body = item
        .description
        .clone()
        .unwrap_or_else(|| "No description recorded.".to_string());

    let mut spec = TooltipSpec {
        entity: entity.clone(),
        title: item.label.clone(),
        kind,
        body,
        notation: item.notation.clone(),
        source: item.provenance.unwrap_or(0),
        refined_body: None,
    };

    let mut warnings = Vec::new();
    if let Some(refiner) = refiner {
        let prompt = refinement_prompt(&spec);
        match refiner.refine(entity, &prompt) {
            Ok(text) => spec.refined_body = Some(text),
            Err(message) => warnings.push(format!(
                "tooltip refinement for {} failed: {message}",
                spec.title
            )),
        }
    }
    Ok((spec, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgraph::EntityKind;
    use alloc::vec::Vec;

    fn sample() -> (KnowledgeGraph, Uri) {
        let mut g = KnowledgeGraph::new();
        let concept = g.create_item("mathematical concept", None, None).unwrap();
        let oc = g
            .create_item(
                "orthocomplement",
                Some("set of vectors orthogonal to a subspace"),
                Some("\\mathbb{U}^\\perp"),
            )
            .unwrap();
        g.set_item_provenance(&oc, 5).unwrap();
        let isa = g.relation_by_label("is_a").unwrap().clone();
        g.assert_statement(&oc, &isa, Node::Entity(concept), None, Vec::new())
            .unwrap();
        (g, oc)
    }

    struct Fixed(&'static str);
    impl TooltipRefiner for Fixed {
        fn refine(&self, _: &Uri, _: &str) -> Result<String, String> {
            Ok(self.0.to_string())
        }
    }

    struct Failing;
    impl TooltipRefiner for Failing {
        fn refine(&self, _: &Uri, _: &str) -> Result<String, String> {
            Err("transport down".to_string())
        }
    }

    #[test]
    fn base_content_from_graph_only() {
        let (g, oc) = sample();
        let (spec, warnings) = generate_tooltip_content(&oc, &g, None).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(spec.title, "orthocomplement");
        assert_eq!(spec.kind, "mathematical concept");
        assert_eq!(spec.body, "set of vectors orthogonal to a subspace");
        assert_eq!(spec.notation.as_deref(), Some("\\mathbb{U}^\\perp"));
        assert_eq!(spec.source, 5);
        assert_eq!(spec.refined_body, None);
    }

    #[test]
    fn refined_body_comes_from_refiner() {
        let (g, oc) = sample();
        let (spec, warnings) =
            generate_tooltip_content(&oc, &g, Some(&Fixed("refined text"))).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(spec.refined_body.as_deref(), Some("refined text"));
    }

    #[test]
    fn refiner_failure_degrades_to_warning() {
        let (g, oc) = sample();
        let (spec, warnings) = generate_tooltip_content(&oc, &g, Some(&Failing)).unwrap();
        assert_eq!(spec.refined_body, None, "base content still returned");
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("transport down"));
    }

    #[test]
    fn unknown_entity_is_an_error() {
        let (g, _) = sample();
        let ghost = Uri::new("main", EntityKind::Item, 99).unwrap();
        assert_eq!(
            generate_tooltip_content(&ghost, &g, None),
            Err(GraphError::UnknownEntity(ghost))
        );
    }

    #[test]
    fn missing_description_has_fallback() {
        let mut g = KnowledgeGraph::new();
        let item = g.create_item("bare", None, None).unwrap();
        let (spec, _) = generate_tooltip_content(&item, &g, None).unwrap();
        assert_eq!(spec.body, "No description recorded.");
        assert_eq!(spec.kind, "term");
        assert_eq!(spec.source, 0);
    }
}
