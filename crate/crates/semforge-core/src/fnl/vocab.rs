//! The controlled predicate vocabulary.
//!
//! Every FNL statement line uses a predicate drawn from this set; each
//! predicate declares what kind of object it expects. The three scope
//! keywords (`setup`, `premise`, `assertion`) structure theorem compounds
//! and are never usable as ordinary predicates.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use core::fmt;

use crate::kgraph::{ScopeKind, BUILTIN_RELATIONS};

/// What a predicate accepts in object position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectKind {
    /// A reference, quoted new term or math term.
    Entity,
    /// A quoted string or a number.
    Literal,
    /// A `$...$` math term.
    Math,
    /// Anything.
    Any,
}

impl ObjectKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectKind::Entity => "entity",
            ObjectKind::Literal => "literal",
            ObjectKind::Math => "math",
            ObjectKind::Any => "any",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "entity" => Some(ObjectKind::Entity),
            "literal" => Some(ObjectKind::Literal),
            "math" => Some(ObjectKind::Math),
            "any" => Some(ObjectKind::Any),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VocabError {
    BadKeyword(String),
    ScopeKeyword(String),
    Duplicate(String),
}

impl fmt::Display for VocabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VocabError::BadKeyword(k) => {
                write!(f, "keyword {k:?} must match [a-z][a-z0-9_]*")
            }
            VocabError::ScopeKeyword(k) => {
                write!(f, "{k:?} is a scope keyword and cannot be a predicate")
            }
            VocabError::Duplicate(k) => write!(f, "duplicate keyword {k:?}"),
        }
    }
}

impl core::error::Error for VocabError {}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

/// The active predicate set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateVocabulary {
    entries: BTreeMap<String, ObjectKind>,
}

impl PredicateVocabulary {
    pub fn new<I, S>(entries: I) -> Result<Self, VocabError>
    where
        I: IntoIterator<Item = (S, ObjectKind)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (keyword, kind) in entries {
            let keyword = keyword.into();
            if !is_identifier(&keyword) {
                return Err(VocabError::BadKeyword(keyword));
            }
            if ScopeKind::parse(&keyword).is_some() {
                return Err(VocabError::ScopeKeyword(keyword));
            }
            if map.insert(keyword.clone(), kind).is_some() {
                return Err(VocabError::Duplicate(keyword));
            }
        }
        Ok(PredicateVocabulary { entries: map })
    }

    /// Default vocabulary mirroring the graph's builtin relations.
    pub fn default_set() -> Self {
        let kinds = |label: &str| match label {
            "is_a" | "subclass_of" | "has_scope" | "has_part" => ObjectKind::Entity,
            "has_label" | "has_description" | "has_source_snippet" => ObjectKind::Literal,
            "has_notation" => ObjectKind::Math,
            _ => ObjectKind::Any,
        };
        PredicateVocabulary::new(
            BUILTIN_RELATIONS
                .iter()
                .map(|label| (label.to_string(), kinds(label))),
        )
        .expect("builtin labels are valid keywords")
    }

    pub fn object_kind(&self, keyword: &str) -> Option<ObjectKind> {
        self.entries.get(keyword).copied()
    }

    pub fn contains(&self, keyword: &str) -> bool {
        self.entries.contains_key(keyword)
    }

    pub fn keywords(&self) -> impl Iterator<Item = (&str, ObjectKind)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Deterministic plain-text listing used to fill the vocabulary slot of
    /// the prompt template.
    pub fn render_listing(&self) -> String {
        let mut out = String::new();
        out.push_str("Predicates (one per statement, object kind in parentheses):\n");
        for (keyword, kind) in &self.entries {
            out.push_str("- ");
            out.push_str(keyword);
            out.push_str(" (");
            out.push_str(kind.as_str());
            out.push_str(")\n");
        }
        out.push_str("Scope keywords for theorem compounds (used alone, with nested children):\n");
        for kind in ScopeKind::ALL {
            out.push_str("- ");
            out.push_str(kind.as_str());
            out.push('\n');
        }
        out
    }
}

impl Default for PredicateVocabulary {
    fn default() -> Self {
        Self::default_set()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_set_mirrors_builtins() {
        let vocab = PredicateVocabulary::default_set();
        for label in BUILTIN_RELATIONS {
            assert!(vocab.contains(label), "{label} missing");
        }
        assert_eq!(vocab.object_kind("has_notation"), Some(ObjectKind::Math));
        assert_eq!(vocab.object_kind("is_a"), Some(ObjectKind::Entity));
    }

    #[test]
    fn scope_keywords_rejected_as_predicates() {
        assert_eq!(
            PredicateVocabulary::new([("premise", ObjectKind::Entity)]),
            Err(VocabError::ScopeKeyword("premise".into()))
        );
    }

    #[test]
    fn keyword_shape_enforced() {
        assert_eq!(
            PredicateVocabulary::new([("Is_A", ObjectKind::Entity)]),
            Err(VocabError::BadKeyword("Is_A".into()))
        );
        assert_eq!(
            PredicateVocabulary::new([("is a", ObjectKind::Entity)]),
            Err(VocabError::BadKeyword("is a".into()))
        );
    }

    #[test]
    fn listing_is_deterministic() {
        let vocab = PredicateVocabulary::default_set();
        assert_eq!(vocab.render_listing(), vocab.render_listing());
        assert!(vocab.render_listing().contains("- has_notation (math)"));
    }
}
