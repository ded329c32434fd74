//! Entity kinds stored in the graph: items, relations, scope items and the
//! literal values allowed in object position.

use alloc::string::{String, ToString};
use core::fmt;

use super::uri::Uri;
use crate::textenc;

/// A node of the graph. Items carry the document-facing label plus optional
/// description, math notation (LaTeX, without `$` delimiters) and the id of
/// the snippet that introduced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub uri: Uri,
    pub label: String,
    pub description: Option<String>,
    pub notation: Option<String>,
    pub provenance: Option<u64>,
}

/// An edge type. Builtin relations are registered at graph creation and are
/// immutable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub uri: Uri,
    pub label: String,
    pub builtin: bool,
}

/// The three scope kinds of a theorem compound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScopeKind {
    Setup,
    Premise,
    Assertion,
}

impl ScopeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScopeKind::Setup => "setup",
            ScopeKind::Premise => "premise",
            ScopeKind::Assertion => "assertion",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "setup" => Some(ScopeKind::Setup),
            "premise" => Some(ScopeKind::Premise),
            "assertion" => Some(ScopeKind::Assertion),
            _ => None,
        }
    }

    pub const ALL: [ScopeKind; 3] = [ScopeKind::Setup, ScopeKind::Premise, ScopeKind::Assertion];
}

impl fmt::Display for ScopeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An item that names one scope (setup/premise/assertion) of a parent item.
/// Statements made inside that scope reference it through their `scope`
/// field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScopeItem {
    pub item: Item,
    pub kind: ScopeKind,
    pub parent: Uri,
}

/// Any addressable non-statement entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entity {
    Item(Item),
    Relation(Relation),
    Scope(ScopeItem),
}

impl Entity {
    pub fn uri(&self) -> &Uri {
        match self {
            Entity::Item(i) => &i.uri,
            Entity::Relation(r) => &r.uri,
            Entity::Scope(s) => &s.item.uri,
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Entity::Item(i) => &i.label,
            Entity::Relation(r) => &r.label,
            Entity::Scope(s) => &s.item.label,
        }
    }

    /// The underlying item for plain items and scope items.
    pub fn as_item(&self) -> Option<&Item> {
        match self {
            Entity::Item(i) => Some(i),
            Entity::Scope(s) => Some(&s.item),
            Entity::Relation(_) => None,
        }
    }
}

/// A literal value; allowed only in object position. Decimals keep their
/// lexical form so serialization is exact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    Str(String),
    Int(i64),
    Dec(String),
}

impl Literal {
    /// Text encoding used by the graph format: `lit:str:"..."`, `lit:int:<n>`
    /// or `lit:dec:<d>`.
    pub fn encode(&self) -> String {
        match self {
            Literal::Str(s) => {
                let mut out = String::from("lit:str:");
                out.push_str(&textenc::quote(s));
                out
            }
            Literal::Int(n) => {
                let mut out = String::from("lit:int:");
                out.push_str(&n.to_string());
                out
            }
            Literal::Dec(d) => {
                let mut out = String::from("lit:dec:");
                out.push_str(d);
                out
            }
        }
    }

    /// Inverse of [`Literal::encode`].
    pub fn decode(s: &str) -> Option<Literal> {
        if let Some(rest) = s.strip_prefix("lit:str:") {
            let (value, used) = textenc::parse_quoted(rest)?;
            if used != rest.len() {
                return None;
            }
            return Some(Literal::Str(value));
        }
        if let Some(rest) = s.strip_prefix("lit:int:") {
            return rest.parse::<i64>().ok().map(Literal::Int);
        }
        if let Some(rest) = s.strip_prefix("lit:dec:") {
            if is_valid_decimal(rest) {
                return Some(Literal::Dec(rest.to_string()));
            }
        }
        None
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// Lexical check for decimal literals: `-?digits.digits`.
pub fn is_valid_decimal(s: &str) -> bool {
    let s = s.strip_prefix('-').unwrap_or(s);
    let Some((int, frac)) = s.split_once('.') else {
        return false;
    };
    !int.is_empty()
        && !frac.is_empty()
        && int.bytes().all(|b| b.is_ascii_digit())
        && frac.bytes().all(|b| b.is_ascii_digit())
}

/// Checks that `{` and `}` are balanced (as required of math notation).
pub fn braces_balanced(s: &str) -> bool {
    let mut depth: i64 = 0;
    let mut escaped = false;
    for c in s.chars() {
        if escaped {
            escaped = false;
            continue;
        }
        match c {
            '\\' => escaped = true,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}
