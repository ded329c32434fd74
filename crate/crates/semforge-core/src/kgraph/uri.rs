//! Resource identifiers.
//!
//! Canonical form is `kb://<namespace>/<K><sequence>` where `K` is `I` for
//! items, `R` for relations and `S` for statements. Sequences start at 1 and
//! are allocated monotonically per kind, so lexicographic URI order within a
//! kind equals allocation order.

use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

/// What a URI addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityKind {
    Item,
    Relation,
    Statement,
}

impl EntityKind {
    pub fn letter(self) -> char {
        match self {
            EntityKind::Item => 'I',
            EntityKind::Relation => 'R',
            EntityKind::Statement => 'S',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'I' => Some(EntityKind::Item),
            'R' => Some(EntityKind::Relation),
            'S' => Some(EntityKind::Statement),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Item => "item",
            EntityKind::Relation => "relation",
            EntityKind::Statement => "statement",
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Globally unique identifier of an entity or statement.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Uri {
    namespace: String,
    kind: EntityKind,
    sequence: u64,
}

/// Why a URI could not be constructed or parsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UriError {
    BadScheme,
    BadNamespace,
    BadKind,
    BadSequence,
}

impl fmt::Display for UriError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UriError::BadScheme => f.write_str("uri must start with kb://"),
            UriError::BadNamespace => f.write_str("namespace must match [a-z][a-z0-9_-]*"),
            UriError::BadKind => f.write_str("kind letter must be one of I, R, S"),
            UriError::BadSequence => f.write_str("sequence must be a positive integer"),
        }
    }
}

impl core::error::Error for UriError {}

pub(crate) fn valid_namespace(ns: &str) -> bool {
    let mut chars = ns.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-')
}

impl Uri {
    pub fn new(namespace: &str, kind: EntityKind, sequence: u64) -> Result<Self, UriError> {
        if !valid_namespace(namespace) {
            return Err(UriError::BadNamespace);
        }
        if sequence == 0 {
            return Err(UriError::BadSequence);
        }
        Ok(Uri {
            namespace: namespace.to_string(),
            kind,
            sequence,
        })
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn kind(&self) -> EntityKind {
        self.kind
    }

    pub fn sequence(&self) -> u64 {
        self.sequence
    }

    /// Compact form without scheme and namespace, e.g. `I3`.
    pub fn short(&self) -> String {
        let mut s = String::new();
        s.push(self.kind.letter());
        s.push_str(&self.sequence.to_string());
        s
    }
}

impl fmt::Display for Uri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "kb://{}/{}{}",
            self.namespace,
            self.kind.letter(),
            self.sequence
        )
    }
}

impl FromStr for Uri {
    type Err = UriError;

    fn from_str(s: &str) -> Result<Self, UriError> {
        let rest = s.strip_prefix("kb://").ok_or(UriError::BadScheme)?;
        let (ns, local) = rest.split_once('/').ok_or(UriError::BadScheme)?;
        if !valid_namespace(ns) {
            return Err(UriError::BadNamespace);
        }
        let mut chars = local.chars();
        let kind = chars
            .next()
            .and_then(EntityKind::from_letter)
            .ok_or(UriError::BadKind)?;
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(UriError::BadSequence);
        }
        let sequence: u64 = digits.parse().map_err(|_| UriError::BadSequence)?;
        if sequence == 0 {
            return Err(UriError::BadSequence);
        }
        Ok(Uri {
            namespace: ns.to_string(),
            kind,
            sequence,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn canonical_round_trip() {
        let uri = Uri::new("main", EntityKind::Item, 12).unwrap();
        assert_eq!(uri.to_string(), "kb://main/I12");
        assert_eq!("kb://main/I12".parse::<Uri>().unwrap(), uri);
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!("http://x/I1".parse::<Uri>(), Err(UriError::BadScheme));
        assert_eq!("kb://Main/I1".parse::<Uri>(), Err(UriError::BadNamespace));
        assert_eq!("kb://main/X1".parse::<Uri>(), Err(UriError::BadKind));
        assert_eq!("kb://main/I0".parse::<Uri>(), Err(UriError::BadSequence));
        assert_eq!("kb://main/I".parse::<Uri>(), Err(UriError::BadSequence));
        assert_eq!("kb://main/I1x".parse::<Uri>(), Err(UriError::BadSequence));
    }

    #[test]
    fn ordering_groups_kinds() {
        let i2 = Uri::new("main", EntityKind::Item, 2).unwrap();
        let i10 = Uri::new("main", EntityKind::Item, 10).unwrap();
        let r1 = Uri::new("main", EntityKind::Relation, 1).unwrap();
        let s1 = Uri::new("main", EntityKind::Statement, 1).unwrap();
        assert!(i2 < i10);
        assert!(i10 < r1);
        assert!(r1 < s1);
    }
}
