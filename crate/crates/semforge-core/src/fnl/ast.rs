//! FNL document tree.
//!
//! A document is a set of per-snippet blocks; each block is a list of
//! statements, nested two spaces per level. Statements are either
//! subject-predicate-object lines or scope keywords opening a theorem
//! compound section.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::kgraph::{Literal, ScopeKind};

/// A term in subject or object position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    /// Identifier referring to a known entity, e.g. `vector_space`.
    Reference(String),
    /// Quoted string introducing a new entity, e.g. `"vector space"`.
    NewTerm(String),
    /// `$`-delimited LaTeX math (stored without the delimiters).
    Math(String),
    /// A literal value.
    Literal(Literal),
}

/// The content of one bullet line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatementBody {
    Spo {
        subject: Term,
        predicate: String,
        object: Term,
    },
    Scope(ScopeKind),
}

/// One bullet line plus its nested children. `source_line` points into the
/// parsed input and is ignored by equality.
#[derive(Debug, Clone, Eq)]
pub struct FnlStatement {
    pub body: StatementBody,
    pub depth: usize,
    pub source_line: usize,
    pub children: Vec<FnlStatement>,
}

impl PartialEq for FnlStatement {
    fn eq(&self, other: &Self) -> bool {
        self.body == other.body && self.depth == other.depth && self.children == other.children
    }
}

impl FnlStatement {
    pub fn is_scope(&self) -> bool {
        matches!(self.body, StatementBody::Scope(_))
    }

    /// Number of statements in this subtree, including this one.
    pub fn subtree_len(&self) -> usize {
        1 + self.children.iter().map(FnlStatement::subtree_len).sum::<usize>()
    }
}

/// Parsed FNL, grouped by snippet id. Block 0 holds statements that appear
/// before any `## snippet <id>` header.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FnlDocument {
    pub blocks: BTreeMap<u64, Vec<FnlStatement>>,
}

impl FnlDocument {
    pub fn is_empty(&self) -> bool {
        self.blocks.values().all(Vec::is_empty)
    }

    /// Total number of statements, nested ones included.
    pub fn statement_count(&self) -> usize {
        self.blocks
            .values()
            .flat_map(|stmts| stmts.iter().map(FnlStatement::subtree_len))
            .sum()
    }

    /// Keeps only the blocks with id strictly below `limit`.
    pub fn blocks_below(&self, limit: u64) -> FnlDocument {
        FnlDocument {
            blocks: self
                .blocks
                .iter()
                .filter(|(id, _)| **id < limit)
                .map(|(id, stmts)| (*id, stmts.clone()))
                .collect(),
        }
    }

    /// Inserts a block, replacing any previous block with the same id.
    pub fn set_block(&mut self, id: u64, statements: Vec<FnlStatement>) {
        self.blocks.insert(id, statements);
    }
}
