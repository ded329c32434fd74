//! Knowledge graph storage and formats: entities, reified statements,
//! triple-pattern queries, the `.kgt` text serialization and the `.kgb`
//! builder-script export.

mod entity;
mod graph;
mod script;
mod statement;
mod text;
mod uri;

pub use entity::{
    braces_balanced, is_valid_decimal, Entity, Item, Literal, Relation, ScopeItem, ScopeKind,
};
pub use graph::{
    normalize_label, normalize_notation, GraphError, KnowledgeGraph, TriplePattern,
    BUILTIN_RELATIONS,
};
pub use script::{export_builder_script, SCRIPT_HEADER};
pub use statement::{Node, Statement};
pub use text::{parse, serialize, TextParseError, FORMAT_HEADER};
pub use uri::{EntityKind, Uri, UriError};
