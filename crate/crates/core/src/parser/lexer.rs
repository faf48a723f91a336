use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Keyword,
    Number,
    Str,
    Char,
    Op,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Byte offset of the first character.
    pub offset: usize,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.text == text
    }

    /// Identifiers and literals: the tokens that carry program content.
    pub fn is_content(&self) -> bool {
        matches!(self.kind, TokenKind::Ident | TokenKind::Number | TokenKind::Str | TokenKind::Char)
            || (self.kind == TokenKind::Keyword && is_literal_keyword(&self.text))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("unterminated string literal at offset {0}")]
    UnterminatedString(usize),
    #[error("unterminated character literal at offset {0}")]
    UnterminatedChar(usize),
    #[error("unterminated block comment at offset {0}")]
    UnterminatedComment(usize),
}

impl LexError {
    pub fn offset(&self) -> usize {
        match *self {
            Self::UnterminatedString(o) | Self::UnterminatedChar(o) | Self::UnterminatedComment(o) => o,
        }
    }
}

const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "true",
    "false",
    "null",
];

pub(crate) fn is_literal_keyword(s: &str) -> bool {
    matches!(s, "true" | "false" | "null")
}

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

// Longest first so that greedy matching picks the right operator.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=",
    "/=", "%=", "&=", "|=", "^=", "<<", ">>", "+", "-", "*", "/", "%", "=", "<", ">", "!", "~", "?", ":", "&", "|",
    "^",
];

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_part(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

/// Splits Java-like source into tokens, dropping whitespace and comments.
///
/// Characters that belong to no token class become single-character
/// punctuation tokens rather than errors.
pub fn tokenize_source(source: &str) -> Result<Vec<Token>, LexError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < source.len() {
        let c = source[i..].chars().next().unwrap_or(' ');
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if source[i..].starts_with("//") {
            i = source[i..].find('\n').map_or(source.len(), |n| i + n + 1);
            continue;
        }
        if source[i..].starts_with("/*") {
            match source[i + 2..].find("*/") {
                Some(n) => i = i + 2 + n + 2,
                None => return Err(LexError::UnterminatedComment(i)),
            }
            continue;
        }
        let start = i;
        if c == '"' || c == '\'' {
            let end = scan_quoted(bytes, i, c as u8).ok_or(if c == '"' {
                LexError::UnterminatedString(start)
            } else {
                LexError::UnterminatedChar(start)
            })?;
            let kind = if c == '"' { TokenKind::Str } else { TokenKind::Char };
            tokens.push(Token { kind, text: source[start..end].to_string(), offset: start });
            i = end;
            continue;
        }
        let next_is_digit = bytes.get(i + 1).is_some_and(u8::is_ascii_digit);
        if c.is_ascii_digit() || (c == '.' && next_is_digit) {
            i = scan_number(bytes, i);
            tokens.push(Token { kind: TokenKind::Number, text: source[start..i].to_string(), offset: start });
            continue;
        }
        if is_ident_start(c) {
            let len: usize = source[i..].chars().take_while(|&ch| is_ident_part(ch)).map(char::len_utf8).sum();
            i += len;
            let text = &source[start..i];
            let kind = if is_keyword(text) { TokenKind::Keyword } else { TokenKind::Ident };
            tokens.push(Token { kind, text: text.to_string(), offset: start });
            continue;
        }
        if let Some(op) = OPERATORS.iter().find(|op| source[i..].starts_with(**op)) {
            i += op.len();
            tokens.push(Token { kind: TokenKind::Op, text: (*op).to_string(), offset: start });
            continue;
        }
        i += c.len_utf8();
        tokens.push(Token { kind: TokenKind::Punct, text: c.to_string(), offset: start });
    }
    Ok(tokens)
}

/// Returns the end offset (exclusive) of a quoted literal, honoring
/// backslash escapes. Literals may not span lines.
fn scan_quoted(bytes: &[u8], start: usize, quote: u8) -> Option<usize> {
    let mut j = start + 1;
    while j < bytes.len() {
        match bytes[j] {
            b'\\' => j += 2,
            b'\n' => return None,
            b if b == quote => return Some(j + 1),
            _ => j += 1,
        }
    }
    None
}

fn scan_number(bytes: &[u8], start: usize) -> usize {
    let mut j = start;
    while j < bytes.len() {
        let b = bytes[j];
        let exponent_sign =
            (b == b'+' || b == b'-') && matches!(bytes[j - 1], b'e' | b'E' | b'p' | b'P') && !is_hex(&bytes[start..j]);
        if b.is_ascii_alphanumeric() || b == b'_' || b == b'.' || exponent_sign {
            j += 1;
        } else {
            break;
        }
    }
    j
}

fn is_hex(num: &[u8]) -> bool {
    num.len() > 1 && num[0] == b'0' && matches!(num[1], b'x' | b'X')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<String> {
        tokenize_source(src).unwrap().into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn simple_declaration() {
        assert_eq!(texts("int x = 1;"), ["int", "x", "=", "1", ";"]);
    }

    #[test]
    fn member_call() {
        assert_eq!(texts("a.b()"), ["a", ".", "b", "(", ")"]);
    }

    #[test]
    fn unclosed_string_reports_offset() {
        assert_eq!(tokenize_source("\"unclosed"), Err(LexError::UnterminatedString(0)));
        assert_eq!(tokenize_source("x = 'a"), Err(LexError::UnterminatedChar(4)));
        assert_eq!(tokenize_source("a /* b"), Err(LexError::UnterminatedComment(2)));
    }

    #[test]
    fn comments_and_literals() {
        assert_eq!(
            texts("x += 1.5e-3f; // note\n/* block */ s = \"a\\\"b\"; c = '\\n';"),
            ["x", "+=", "1.5e-3f", ";", "s", "=", "\"a\\\"b\"", ";", "c", "=", "'\\n'", ";"]
        );
        assert_eq!(texts("0x1E+2"), ["0x1E", "+", "2"]);
        assert_eq!(texts("a>>>=b"), ["a", ">>>=", "b"]);
    }

    #[test]
    fn keywords_are_classified() {
        let toks = tokenize_source("return true;").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Keyword);
        assert!(toks[1].is_content());
        assert!(!toks[0].is_content());
    }

    #[test]
    fn unknown_characters_become_punctuation() {
        assert_eq!(texts("a # b"), ["a", "#", "b"]);
    }
}
