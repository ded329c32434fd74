//! The in-memory knowledge graph: entity storage, URI allocation, label and
//! notation indexes, and triple-pattern queries.
//!
//! All collections are ordered (`BTreeMap`/`Vec`), so iteration order — and
//! with it serialization and export — is fully deterministic.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::entity::{braces_balanced, Entity, Item, Relation, ScopeItem, ScopeKind};
use super::statement::{Node, Statement};
use super::uri::{valid_namespace, EntityKind, Uri};

/// Relations registered in every freshly created graph, in allocation order
/// (`R1` through `R8`).
pub const BUILTIN_RELATIONS: [&str; 8] = [
    "is_a",
    "subclass_of",
    "has_label",
    "has_description",
    "has_notation",
    "has_scope",
    "has_source_snippet",
    "has_part",
];

/// Errors raised by graph mutations and queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    EmptyLabel,
    InvalidLabel(String),
    DuplicateLabel(String),
    InvalidNotation(String),
    InvalidNamespace(String),
    UnknownEntity(Uri),
    PredicateNotRelation(Uri),
    InvalidSubject(Uri),
    InvalidObject(Uri),
    InvalidScope(Uri),
    DuplicateScope(ScopeKind),
    NotAnItem(Uri),
    BuiltinImmutable(Uri),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::EmptyLabel => f.write_str("label must be nonempty"),
            GraphError::InvalidLabel(l) => write!(f, "label {l:?} contains control characters"),
            GraphError::DuplicateLabel(l) => write!(f, "label {l:?} is already bound"),
            GraphError::InvalidNotation(n) => {
                write!(f, "notation {n:?} is empty or has unbalanced braces")
            }
            GraphError::InvalidNamespace(ns) => write!(f, "invalid namespace {ns:?}"),
            GraphError::UnknownEntity(u) => write!(f, "unknown entity {u}"),
            GraphError::PredicateNotRelation(u) => write!(f, "{u} is not a relation"),
            GraphError::InvalidSubject(u) => {
                write!(f, "{u} cannot be a subject (must be item or statement)")
            }
            GraphError::InvalidObject(u) => {
                write!(f, "{u} cannot be an object (must be item or statement)")
            }
            GraphError::InvalidScope(u) => write!(f, "{u} is not a scope item"),
            GraphError::DuplicateScope(k) => write!(f, "parent already has a {k} scope"),
            GraphError::NotAnItem(u) => write!(f, "{u} is not an item"),
            GraphError::BuiltinImmutable(u) => write!(f, "builtin relation {u} is immutable"),
        }
    }
}

impl core::error::Error for GraphError {}

/// A single triple pattern; `None` positions are wildcards.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: Option<Uri>,
    pub predicate: Option<Uri>,
    pub object: Option<Node>,
}

/// Normalizes a label for identifier-style lookup: lowercased, with runs of
/// non-alphanumeric characters collapsed to a single underscore.
pub fn normalize_label(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    let mut pending_sep = false;
    for c in label.chars() {
        if c.is_alphanumeric() {
            if pending_sep && !out.is_empty() {
                out.push('_');
            }
            pending_sep = false;
            for lower in c.to_lowercase() {
                out.push(lower);
            }
        } else {
            pending_sep = true;
        }
    }
    out
}

/// Strips all whitespace from a math notation string; used as the notation
/// index key so spacing variants compare equal.
pub fn normalize_notation(notation: &str) -> String {
    notation.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Entity and statement store with deterministic URI allocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeGraph {
    namespace: String,
    entities: BTreeMap<Uri, Entity>,
    statements: Vec<Statement>,
    statement_by_uri: BTreeMap<Uri, usize>,
    item_labels: BTreeMap<(String, String), Uri>,
    relation_labels: BTreeMap<(String, String), Uri>,
    normalized_labels: BTreeMap<String, Vec<Uri>>,
    notations: BTreeMap<String, Vec<Uri>>,
    scopes: BTreeMap<(Uri, ScopeKind), Uri>,
    next_seq: BTreeMap<EntityKind, u64>,
}

impl Default for KnowledgeGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl KnowledgeGraph {
    /// New graph in namespace `main` with the builtin relations registered.
    pub fn new() -> Self {
        Self::with_namespace("main").expect("default namespace is valid")
    }

    /// New graph with builtins, allocating in the given namespace.
    pub fn with_namespace(namespace: &str) -> Result<Self, GraphError> {
        let mut g = Self::bare(namespace)?;
        for label in BUILTIN_RELATIONS {
            let uri = g.alloc(EntityKind::Relation);
            g.insert_relation(Relation {
                uri,
                label: label.to_string(),
                builtin: true,
            })
            .expect("builtin labels are distinct");
        }
        Ok(g)
    }

    /// New graph without any pre-registered relations. Used by the text
    /// format parser, which restores every entity from the input.
    pub fn bare(namespace: &str) -> Result<Self, GraphError> {
        if !valid_namespace(namespace) {
            return Err(GraphError::InvalidNamespace(namespace.to_string()));
        }
        Ok(KnowledgeGraph {
            namespace: namespace.to_string(),
            entities: BTreeMap::new(),
            statements: Vec::new(),
            statement_by_uri: BTreeMap::new(),
            item_labels: BTreeMap::new(),
            relation_labels: BTreeMap::new(),
            normalized_labels: BTreeMap::new(),
            notations: BTreeMap::new(),
            scopes: BTreeMap::new(),
            next_seq: BTreeMap::new(),
        })
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    fn alloc(&mut self, kind: EntityKind) -> Uri {
        let seq = self.next_seq.entry(kind).or_insert(1);
        let uri = Uri::new(&self.namespace, kind, *seq).expect("namespace validated");
        *seq += 1;
        uri
    }

    /// Next sequence number that would be allocated for `kind`.
    pub fn next_sequence(&self, kind: EntityKind) -> u64 {
        self.next_seq.get(&kind).copied().unwrap_or(1)
    }

    fn check_label(label: &str) -> Result<(), GraphError> {
        if label.is_empty() {
            return Err(GraphError::EmptyLabel);
        }
        if label.chars().any(|c| c.is_control()) {
            return Err(GraphError::InvalidLabel(label.to_string()));
        }
        Ok(())
    }

    fn check_notation(notation: &str) -> Result<(), GraphError> {
        if notation.trim().is_empty() || !braces_balanced(notation) {
            return Err(GraphError::InvalidNotation(notation.to_string()));
        }
        Ok(())
    }

    // ----- creation -----

    /// Creates an item and returns its freshly allocated URI.
    pub fn create_item(
        &mut self,
        label: &str,
        description: Option<&str>,
        notation: Option<&str>,
    ) -> Result<Uri, GraphError> {
        Self::check_label(label)?;
        if let Some(n) = notation {
            Self::check_notation(n)?;
        }
        let key = (self.namespace.clone(), label.to_string());
        if self.item_labels.contains_key(&key) {
            return Err(GraphError::DuplicateLabel(label.to_string()));
        }
        let uri = self.alloc(EntityKind::Item);
        self.insert_item(Item {
            uri: uri.clone(),
            label: label.to_string(),
            description: description.map(|s| s.to_string()),
            notation: notation.map(|s| s.to_string()),
            provenance: None,
        })?;
        Ok(uri)
    }

    /// Creates a non-builtin relation.
    pub fn create_relation(&mut self, label: &str) -> Result<Uri, GraphError> {
        Self::check_label(label)?;
        let key = (self.namespace.clone(), label.to_string());
        if self.relation_labels.contains_key(&key) {
            return Err(GraphError::DuplicateLabel(label.to_string()));
        }
        let uri = self.alloc(EntityKind::Relation);
        self.insert_relation(Relation {
            uri: uri.clone(),
            label: label.to_string(),
            builtin: false,
        })?;
        Ok(uri)
    }

    /// Creates the scope item of `kind` under `parent`. Each parent may hold
    /// at most one scope item per kind; the scope item's label is derived
    /// from the parent label.
    pub fn create_scope_item(&mut self, parent: &Uri, kind: ScopeKind) -> Result<Uri, GraphError> {
        let parent_item = match self.entities.get(parent) {
            Some(Entity::Item(i)) => i,
            Some(Entity::Scope(s)) => &s.item,
            Some(_) => return Err(GraphError::NotAnItem(parent.clone())),
            None => return Err(GraphError::UnknownEntity(parent.clone())),
        };
        if self.scopes.contains_key(&(parent.clone(), kind)) {
            return Err(GraphError::DuplicateScope(kind));
        }
        let label = format!("{} ({})", parent_item.label, kind.as_str());
        Self::check_label(&label)?;
        let key = (self.namespace.clone(), label.clone());
        if self.item_labels.contains_key(&key) {
            return Err(GraphError::DuplicateLabel(label));
        }
        let uri = self.alloc(EntityKind::Item);
        let scope = ScopeItem {
            item: Item {
                uri: uri.clone(),
                label,
                description: None,
                notation: None,
                provenance: None,
            },
            kind,
            parent: parent.clone(),
        };
        self.insert_scope(scope)?;
        Ok(uri)
    }

    /// Asserts a statement. Subject must be an item or statement, the
    /// predicate a relation; entity objects must be items or statements, and
    /// `scope` (when given) a scope item.
    pub fn assert_statement(
        &mut self,
        subject: &Uri,
        predicate: &Uri,
        object: Node,
        scope: Option<&Uri>,
        qualifiers: Vec<(Uri, Node)>,
    ) -> Result<Uri, GraphError> {
        self.check_subject_position(subject)?;
        self.check_predicate(predicate)?;
        if let Node::Entity(obj) = &object {
            self.check_object_position(obj)?;
        }
        if let Some(scope_uri) = scope {
            match self.entities.get(scope_uri) {
                Some(Entity::Scope(_)) => {}
                Some(_) => return Err(GraphError::InvalidScope(scope_uri.clone())),
                None => return Err(GraphError::UnknownEntity(scope_uri.clone())),
            }
        }
        for (rel, obj) in &qualifiers {
            self.check_predicate(rel)?;
            if let Node::Entity(u) = obj {
                self.check_object_position(u)?;
            }
        }
        let uri = self.alloc(EntityKind::Statement);
        let statement = Statement {
            uri: uri.clone(),
            subject: subject.clone(),
            predicate: predicate.clone(),
            object,
            scope: scope.cloned(),
            qualifiers,
        };
        self.statement_by_uri
            .insert(uri.clone(), self.statements.len());
        self.statements.push(statement);
        Ok(uri)
    }

    fn check_subject_position(&self, uri: &Uri) -> Result<(), GraphError> {
        match uri.kind() {
            EntityKind::Item => {
                if !self.entities.contains_key(uri) {
                    return Err(GraphError::UnknownEntity(uri.clone()));
                }
            }
            EntityKind::Statement => {
                if !self.statement_by_uri.contains_key(uri) {
                    return Err(GraphError::UnknownEntity(uri.clone()));
                }
            }
            EntityKind::Relation => {
                if !self.entities.contains_key(uri) {
                    return Err(GraphError::UnknownEntity(uri.clone()));
                }
                return Err(GraphError::InvalidSubject(uri.clone()));
            }
        }
        Ok(())
    }

    fn check_object_position(&self, uri: &Uri) -> Result<(), GraphError> {
        match uri.kind() {
            EntityKind::Item => {
                if !self.entities.contains_key(uri) {
                    return Err(GraphError::UnknownEntity(uri.clone()));
                }
            }
            EntityKind::Statement => {
                if !self.statement_by_uri.contains_key(uri) {
                    return Err(GraphError::UnknownEntity(uri.clone()));
                }
            }
            EntityKind::Relation => {
                if !self.entities.contains_key(uri) {
                    return Err(GraphError::UnknownEntity(uri.clone()));
                }
                return Err(GraphError::InvalidObject(uri.clone()));
            }
        }
        Ok(())
    }

    fn check_predicate(&self, uri: &Uri) -> Result<(), GraphError> {
        match self.entities.get(uri) {
            Some(Entity::Relation(_)) => Ok(()),
            Some(_) => Err(GraphError::PredicateNotRelation(uri.clone())),
            None => {
                if uri.kind() == EntityKind::Statement && self.statement_by_uri.contains_key(uri) {
                    Err(GraphError::PredicateNotRelation(uri.clone()))
                } else {
                    Err(GraphError::UnknownEntity(uri.clone()))
                }
            }
        }
    }

    // ----- item mutation (index-preserving) -----

    /// Sets or replaces an item's description.
    pub fn set_item_description(&mut self, uri: &Uri, description: &str) -> Result<(), GraphError> {
        match self.entities.get_mut(uri) {
            Some(Entity::Item(i)) => {
                i.description = Some(description.to_string());
                Ok(())
            }
            Some(Entity::Scope(s)) => {
                s.item.description = Some(description.to_string());
                Ok(())
            }
            Some(_) => Err(GraphError::NotAnItem(uri.clone())),
            None => Err(GraphError::UnknownEntity(uri.clone())),
        }
    }

    /// Sets or replaces an item's notation, keeping the notation index
    /// consistent.
    pub fn set_item_notation(&mut self, uri: &Uri, notation: &str) -> Result<(), GraphError> {
        Self::check_notation(notation)?;
        let item = match self.entities.get_mut(uri) {
            Some(Entity::Item(i)) => i,
            Some(Entity::Scope(s)) => &mut s.item,
            Some(_) => return Err(GraphError::NotAnItem(uri.clone())),
            None => return Err(GraphError::UnknownEntity(uri.clone())),
        };
        if let Some(old) = item.notation.take() {
            let key = normalize_notation(&old);
            if let Some(uris) = self.notations.get_mut(&key) {
                uris.retain(|u| u != uri);
                if uris.is_empty() {
                    self.notations.remove(&key);
                }
            }
        }
        let item = match self.entities.get_mut(uri) {
            Some(Entity::Item(i)) => i,
            Some(Entity::Scope(s)) => &mut s.item,
            _ => unreachable!("checked above"),
        };
        item.notation = Some(notation.to_string());
        self.notations
            .entry(normalize_notation(notation))
            .or_default()
            .push(uri.clone());
        Ok(())
    }

    /// Records the snippet that introduced an item.
    pub fn set_item_provenance(&mut self, uri: &Uri, snippet: u64) -> Result<(), GraphError> {
        match self.entities.get_mut(uri) {
            Some(Entity::Item(i)) => {
                i.provenance = Some(snippet);
                Ok(())
            }
            Some(Entity::Scope(s)) => {
                s.item.provenance = Some(snippet);
                Ok(())
            }
            Some(_) => Err(GraphError::NotAnItem(uri.clone())),
            None => Err(GraphError::UnknownEntity(uri.clone())),
        }
    }

    // ----- raw insertion (parser / deserialization path) -----

    /// Inserts a fully-formed item, updating indexes. URIs must be unused and
    /// labels unique; sequence counters are bumped past the inserted URI.
    pub fn insert_item(&mut self, item: Item) -> Result<(), GraphError> {
        Self::check_label(&item.label)?;
        if let Some(n) = &item.notation {
            Self::check_notation(n)?;
        }
        let key = (item.uri.namespace().to_string(), item.label.clone());
        if self.item_labels.contains_key(&key) {
            return Err(GraphError::DuplicateLabel(item.label));
        }
        self.bump_counter(&item.uri);
        self.item_labels.insert(key, item.uri.clone());
        self.normalized_labels
            .entry(normalize_label(&item.label))
            .or_default()
            .push(item.uri.clone());
        if let Some(n) = &item.notation {
            self.notations
                .entry(normalize_notation(n))
                .or_default()
                .push(item.uri.clone());
        }
        self.entities.insert(item.uri.clone(), Entity::Item(item));
        Ok(())
    }

    /// Inserts a fully-formed relation, updating indexes.
    pub fn insert_relation(&mut self, relation: Relation) -> Result<(), GraphError> {
        Self::check_label(&relation.label)?;
        let key = (relation.uri.namespace().to_string(), relation.label.clone());
        if self.relation_labels.contains_key(&key) {
            return Err(GraphError::DuplicateLabel(relation.label));
        }
        self.bump_counter(&relation.uri);
        self.relation_labels.insert(key, relation.uri.clone());
        self.entities
            .insert(relation.uri.clone(), Entity::Relation(relation));
        Ok(())
    }

    /// Inserts a fully-formed scope item, updating indexes.
    pub fn insert_scope(&mut self, scope: ScopeItem) -> Result<(), GraphError> {
        Self::check_label(&scope.item.label)?;
        match self.entities.get(&scope.parent) {
            Some(Entity::Item(_)) | Some(Entity::Scope(_)) => {}
            Some(_) => return Err(GraphError::NotAnItem(scope.parent.clone())),
            None => return Err(GraphError::UnknownEntity(scope.parent.clone())),
        }
        let scope_key = (scope.parent.clone(), scope.kind);
        if self.scopes.contains_key(&scope_key) {
            return Err(GraphError::DuplicateScope(scope.kind));
        }
        let key = (scope.item.uri.namespace().to_string(), scope.item.label.clone());
        if self.item_labels.contains_key(&key) {
            return Err(GraphError::DuplicateLabel(scope.item.label));
        }
        self.bump_counter(&scope.item.uri);
        self.item_labels.insert(key, scope.item.uri.clone());
        self.normalized_labels
            .entry(normalize_label(&scope.item.label))
            .or_default()
            .push(scope.item.uri.clone());
        if let Some(n) = &scope.item.notation {
            self.notations
                .entry(normalize_notation(n))
                .or_default()
                .push(scope.item.uri.clone());
        }
        self.scopes.insert(scope_key, scope.item.uri.clone());
        self.entities
            .insert(scope.item.uri.clone(), Entity::Scope(scope));
        Ok(())
    }

    /// Inserts a fully-formed statement after validating its references.
    pub fn insert_statement(&mut self, statement: Statement) -> Result<(), GraphError> {
        self.check_subject_position(&statement.subject)?;
        self.check_predicate(&statement.predicate)?;
        if let Node::Entity(u) = &statement.object {
            self.check_object_position(u)?;
        }
        if let Some(scope_uri) = &statement.scope {
            match self.entities.get(scope_uri) {
                Some(Entity::Scope(_)) => {}
                Some(_) => return Err(GraphError::InvalidScope(scope_uri.clone())),
                None => return Err(GraphError::UnknownEntity(scope_uri.clone())),
            }
        }
        for (rel, obj) in &statement.qualifiers {
            self.check_predicate(rel)?;
            if let Node::Entity(u) = obj {
                self.check_object_position(u)?;
            }
        }
        self.bump_counter(&statement.uri);
        self.statement_by_uri
            .insert(statement.uri.clone(), self.statements.len());
        self.statements.push(statement);
        Ok(())
    }

    fn bump_counter(&mut self, uri: &Uri) {
        if uri.namespace() == self.namespace {
            let next = self.next_seq.entry(uri.kind()).or_insert(1);
            if uri.sequence() >= *next {
                *next = uri.sequence() + 1;
            }
        }
    }

    // ----- lookup -----

    pub fn entity(&self, uri: &Uri) -> Option<&Entity> {
        self.entities.get(uri)
    }

    pub fn contains(&self, uri: &Uri) -> bool {
        self.entities.contains_key(uri) || self.statement_by_uri.contains_key(uri)
    }

    /// The underlying item, for both plain items and scope items.
    pub fn item(&self, uri: &Uri) -> Option<&Item> {
        self.entities.get(uri).and_then(Entity::as_item)
    }

    pub fn relation(&self, uri: &Uri) -> Option<&Relation> {
        match self.entities.get(uri) {
            Some(Entity::Relation(r)) => Some(r),
            _ => None,
        }
    }

    pub fn scope_item(&self, uri: &Uri) -> Option<&ScopeItem> {
        match self.entities.get(uri) {
            Some(Entity::Scope(s)) => Some(s),
            _ => None,
        }
    }

    pub fn statement(&self, uri: &Uri) -> Option<&Statement> {
        self.statement_by_uri
            .get(uri)
            .map(|&idx| &self.statements[idx])
    }

    /// All statements in assertion order.
    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    pub fn entities(&self) -> impl Iterator<Item = (&Uri, &Entity)> {
        self.entities.iter()
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    /// Exact label lookup among items (graph namespace).
    pub fn item_by_label(&self, label: &str) -> Option<&Uri> {
        self.item_labels
            .get(&(self.namespace.clone(), label.to_string()))
    }

    /// Exact label lookup among relations (graph namespace).
    pub fn relation_by_label(&self, label: &str) -> Option<&Uri> {
        self.relation_labels
            .get(&(self.namespace.clone(), label.to_string()))
    }

    /// Items whose normalized label equals `normalized`.
    pub fn items_by_normalized_label(&self, normalized: &str) -> &[Uri] {
        self.normalized_labels
            .get(normalized)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// Items whose whitespace-normalized notation equals `normalized`.
    pub fn items_by_notation(&self, normalized: &str) -> &[Uri] {
        self.notations
            .get(normalized)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// The scope item of `kind` under `parent`, if present.
    pub fn scope_of(&self, parent: &Uri, kind: ScopeKind) -> Option<&Uri> {
        self.scopes.get(&(parent.clone(), kind))
    }

    /// Does any item carry provenance `snippet`? Used as the recompilation
    /// guard.
    pub fn has_provenance(&self, snippet: u64) -> bool {
        self.entities.values().any(|e| {
            e.as_item()
                .map(|i| i.provenance == Some(snippet))
                .unwrap_or(false)
        })
    }

    // ----- query -----

    /// Returns the statements matching every bound position of the pattern,
    /// in assertion order. Bound URIs must exist in the graph.
    pub fn query(&self, pattern: &TriplePattern) -> Result<Vec<Statement>, GraphError> {
        if let Some(s) = &pattern.subject {
            if !self.contains(s) {
                return Err(GraphError::UnknownEntity(s.clone()));
            }
        }
        if let Some(p) = &pattern.predicate {
            if !self.contains(p) {
                return Err(GraphError::UnknownEntity(p.clone()));
            }
        }
        if let Some(Node::Entity(o)) = &pattern.object {
            if !self.contains(o) {
                return Err(GraphError::UnknownEntity(o.clone()));
            }
        }
        Ok(self
            .statements
            .iter()
            .filter(|st| {
                pattern.subject.as_ref().is_none_or(|s| &st.subject == s)
                    && pattern
                        .predicate
                        .as_ref()
                        .is_none_or(|p| &st.predicate == p)
                    && pattern.object.as_ref().is_none_or(|o| &st.object == o)
            })
            .cloned()
            .collect())
    }

    // ----- integrity -----

    /// Rebuilds every index from the entity store and compares with the live
    /// ones; also re-checks referential integrity of all statements. Returns
    /// a description of the first inconsistency found.
    pub fn check_integrity(&self) -> Result<(), String> {
        let mut item_labels = BTreeMap::new();
        let mut relation_labels = BTreeMap::new();
        let mut normalized: BTreeMap<String, Vec<Uri>> = BTreeMap::new();
        let mut notations: BTreeMap<String, Vec<Uri>> = BTreeMap::new();
        let mut scopes = BTreeMap::new();
        for (uri, entity) in &self.entities {
            match entity {
                Entity::Relation(r) => {
                    relation_labels.insert(
                        (uri.namespace().to_string(), r.label.clone()),
                        uri.clone(),
                    );
                }
                Entity::Item(_) | Entity::Scope(_) => {
                    let item = entity.as_item().expect("item-backed entity");
                    item_labels
                        .insert((uri.namespace().to_string(), item.label.clone()), uri.clone());
                    normalized
                        .entry(normalize_label(&item.label))
                        .or_default()
                        .push(uri.clone());
                    if let Some(n) = &item.notation {
                        notations
                            .entry(normalize_notation(n))
                            .or_default()
                            .push(uri.clone());
                    }
                    if let Entity::Scope(s) = entity {
                        scopes.insert((s.parent.clone(), s.kind), uri.clone());
                        if self.entity(&s.parent).and_then(Entity::as_item).is_none() {
                            return Err(format!("scope {uri} has non-item parent {}", s.parent));
                        }
                    }
                }
            }
        }
        if item_labels != self.item_labels {
            return Err("item label index out of sync".to_string());
        }
        if relation_labels != self.relation_labels {
            return Err("relation label index out of sync".to_string());
        }
        if normalized != self.normalized_labels {
            return Err("normalized label index out of sync".to_string());
        }
        if notations != self.notations {
            return Err("notation index out of sync".to_string());
        }
        if scopes != self.scopes {
            return Err("scope index out of sync".to_string());
        }
        for (idx, st) in self.statements.iter().enumerate() {
            if self.statement_by_uri.get(&st.uri) != Some(&idx) {
                return Err(format!("statement index out of sync for {}", st.uri));
            }
            if !self.contains(&st.subject) {
                return Err(format!("{}: dangling subject {}", st.uri, st.subject));
            }
            if self.relation(&st.predicate).is_none() {
                return Err(format!("{}: predicate {} not a relation", st.uri, st.predicate));
            }
            if let Node::Entity(o) = &st.object {
                if !self.contains(o) {
                    return Err(format!("{}: dangling object {o}", st.uri));
                }
            }
            if let Some(scope) = &st.scope {
                match self.scope_item(scope) {
                    Some(s) => {
                        if self.entity(&s.parent).is_none() {
                            return Err(format!("{}: scope parent missing", st.uri));
                        }
                    }
                    None => return Err(format!("{}: scope {scope} is not a scope item", st.uri)),
                }
            }
        }
        Ok(())
    }
}
