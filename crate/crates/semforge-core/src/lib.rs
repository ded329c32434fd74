//! Core machinery for converting annotated LaTeX sources into a formal
//! knowledge graph and back into semantically enriched HTML.
//!
//! The crate is `no_std` (with `alloc`) and free of IO: every function is a
//! pure transformation over owned data, which keeps the whole pipeline
//! deterministic and easy to test. File handling, the LLM client and the
//! command line live in the companion `semforge` crate.
//!
//! Module map:
//!
//! - [`kgraph`] — entities, reified statements, triple queries, the `.kgt`
//!   text format and the `.kgb` builder-script export.
//! - [`latex`] — snippet delimitation and context windows over LaTeX sources.
//! - [`fnl`] — the controlled subject-predicate-object language used as the
//!   LLM output format: parser, canonical serializer, linter and differ.
//! - [`prompt`] — the seven-part prompt template and deterministic assembly.
//! - [`compiler`] — FNL documents into knowledge-graph entities/statements.
//! - [`semlayer`] — LaTeX-to-HTML conversion, occurrence indexing and the
//!   hover tooltip layer.

#![no_std]

extern crate alloc;

pub mod compiler;
pub mod fnl;
pub mod kgraph;
pub mod latex;
pub mod prompt;
pub mod semlayer;

mod textenc;

pub use kgraph::{EntityKind, KnowledgeGraph, Literal, Node, ScopeKind, Uri};
