//! Shared escaping rules for the line-oriented text formats.
//!
//! Both the graph format and FNL quote strings the same way, so the escape
//! tables live here. Escapes: `\\`, `\"`, `\t`, `\n`.

use alloc::string::String;

/// Escape a bare (unquoted) field: tab, newline and backslash.
pub(crate) fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out
}

/// Reverse of [`escape_field`]. Returns `None` on a dangling backslash or an
/// unknown escape.
pub(crate) fn unescape_field(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next()? {
            '\\' => out.push('\\'),
            't' => out.push('\t'),
            'n' => out.push('\n'),
            '"' => out.push('"'),
            _ => return None,
        }
    }
    Some(out)
}

/// Quote a string: wraps in `"` and escapes `\\`, `\"`, `\t`, `\n`.
pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Parse a quoted string starting at the first byte of `s` (which must be
/// `"`). Returns the decoded content and the byte length consumed, or `None`
/// if the quote never closes or an escape is invalid.
pub(crate) fn parse_quoted(s: &str) -> Option<(String, usize)> {
    let mut chars = s.char_indices();
    match chars.next() {
        Some((_, '"')) => {}
        _ => return None,
    }
    let mut out = String::new();
    while let Some((i, c)) = chars.next() {
        match c {
            '"' => return Some((out, i + 1)),
            '\\' => match chars.next() {
                Some((_, '\\')) => out.push('\\'),
                Some((_, '"')) => out.push('"'),
                Some((_, 't')) => out.push('\t'),
                Some((_, 'n')) => out.push('\n'),
                _ => return None,
            },
            _ => out.push(c),
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trip() {
        let raw = "a\tb\\c\nd";
        assert_eq!(unescape_field(&escape_field(raw)).unwrap(), raw);
    }

    #[test]
    fn quoted_round_trip() {
        let raw = "say \"hi\"\t\\done";
        let quoted = quote(raw);
        let (back, used) = parse_quoted(&quoted).unwrap();
        assert_eq!(back, raw);
        assert_eq!(used, quoted.len());
    }

    #[test]
    fn quoted_rejects_unterminated() {
        assert!(parse_quoted("\"abc").is_none());
        assert!(parse_quoted("\"ab\\q\"").is_none());
    }
}
