//! Reified statements: node-edge-node records that are themselves
//! addressable and can appear as subject or object of other statements.

use alloc::vec::Vec;

use super::entity::Literal;
use super::uri::Uri;

/// Object position of a statement: another entity/statement or a literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Entity(Uri),
    Literal(Literal),
}

impl Node {
    pub fn as_uri(&self) -> Option<&Uri> {
        match self {
            Node::Entity(u) => Some(u),
            Node::Literal(_) => None,
        }
    }
}

/// A stored statement. `scope`, when set, points at a scope item; qualifiers
/// attach extra relation/object pairs to the statement itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub uri: Uri,
    pub subject: Uri,
    pub predicate: Uri,
    pub object: Node,
    pub scope: Option<Uri>,
    pub qualifiers: Vec<(Uri, Node)>,
}
