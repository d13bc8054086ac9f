//! Lexer for Java- and C#-like source code.
//!
//! One lexical grammar covers both languages: the keyword set is the union of
//! the two, minus C# contextual words that are ordinary identifiers in Java
//! code (`in`, `out`, `base`, `var`, ...). Operators are matched by maximal
//! munch. Comments and whitespace are skipped but never lost: every token
//! carries its byte offset, and the gaps between tokens contain only
//! whitespace and comments.

use std::collections::HashSet;
use std::sync::LazyLock;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Identifier,
    Keyword,
    Number,
    StringLit,
    CharLit,
    Operator,
    Punct,
    Comment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    /// Byte offset of the first character in the source.
    pub offset: usize,
}

impl<'a> Token<'a> {
    pub fn end(&self) -> usize {
        self.offset + self.text.len()
    }

    pub fn is_keyword(&self, word: &str) -> bool {
        self.kind == TokenKind::Keyword && self.text == word
    }

    pub fn is_op(&self, op: &str) -> bool {
        self.kind == TokenKind::Operator && self.text == op
    }

    pub fn is_punct(&self, p: &str) -> bool {
        self.kind == TokenKind::Punct && self.text == p
    }

    pub fn is_literal(&self) -> bool {
        matches!(
            self.kind,
            TokenKind::Number | TokenKind::StringLit | TokenKind::CharLit
        ) || (self.kind == TokenKind::Keyword && matches!(self.text, "true" | "false" | "null"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexError {
    #[error("unterminated string literal at byte {offset}")]
    UnterminatedString { offset: usize },
    #[error("unterminated character literal at byte {offset}")]
    UnterminatedChar { offset: usize },
    #[error("unterminated block comment at byte {offset}")]
    UnterminatedComment { offset: usize },
}

impl LexError {
    pub fn offset(&self) -> usize {
        match *self {
            LexError::UnterminatedString { offset }
            | LexError::UnterminatedChar { offset }
            | LexError::UnterminatedComment { offset } => offset,
        }
    }
}

const KEYWORDS: &[&str] = &[
    // Java
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally",
    "float", "for", "goto", "if", "implements", "import", "instanceof", "int", "interface",
    "long", "native", "new", "package", "private", "protected", "public", "return", "short",
    "static", "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
    "transient", "try", "void", "volatile", "while", "true", "false", "null",
    // C# additions that never serve as Java identifiers in practice
    "bool", "checked", "decimal", "delegate", "explicit", "extern", "fixed", "foreach",
    "implicit", "internal", "namespace", "override", "readonly", "sbyte", "sealed", "sizeof",
    "stackalloc", "string", "struct", "typeof", "uint", "ulong", "unchecked", "unsafe",
    "ushort", "using", "virtual",
];

// Longest first so the first prefix hit is the maximal munch.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "??=", "->", "=>", "::", "++", "--", "&&", "||", "==", "!=",
    "<=", ">=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "??", "?.", "+",
    "-", "*", "/", "%", "=", "<", ">", "!", "~", "?", ":", "&", "|", "^",
];

static KEYWORD_SET: LazyLock<HashSet<&'static str>> = LazyLock::new(|| KEYWORDS.iter().copied().collect());

pub fn is_keyword(word: &str) -> bool {
    KEYWORD_SET.contains(word)
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphanumeric()
}

fn is_space(c: char) -> bool {
    c.is_whitespace() || c == '\u{feff}'
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek_char(&self, at: usize) -> Option<char> {
        self.src.get(at..).and_then(|s| s.chars().next())
    }

    fn byte(&self, at: usize) -> Option<u8> {
        self.bytes.get(at).copied()
    }

    fn token(&self, kind: TokenKind, start: usize) -> Token<'a> {
        Token {
            kind,
            text: &self.src[start..self.pos],
            offset: start,
        }
    }

    fn next_token(&mut self) -> Option<Result<Token<'a>, LexError>> {
        while let Some(c) = self.peek_char(self.pos) {
            if is_space(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        let start = self.pos;
        let c = self.peek_char(start)?;
        let next = self.byte(start + 1);

        let result = match c {
            '/' if next == Some(b'/') => {
                let end = self.src[start..]
                    .find('\n')
                    .map_or(self.src.len(), |i| start + i);
                self.pos = end;
                Ok(self.token(TokenKind::Comment, start))
            }
            '/' if next == Some(b'*') => match self.src[start + 2..].find("*/") {
                Some(i) => {
                    self.pos = start + 2 + i + 2;
                    Ok(self.token(TokenKind::Comment, start))
                }
                None => Err(LexError::UnterminatedComment { offset: start }),
            },
            '"' => self.string(start, start),
            '\'' => self.char_lit(start),
            '@' if next == Some(b'"') => self.verbatim_string(start, start + 1),
            '@' if next == Some(b'$') && self.byte(start + 2) == Some(b'"') => {
                self.verbatim_string(start, start + 2)
            }
            '$' if next == Some(b'"') => self.string(start, start + 1),
            '$' if next == Some(b'@') && self.byte(start + 2) == Some(b'"') => {
                self.verbatim_string(start, start + 2)
            }
            c if c.is_ascii_digit() => {
                self.number(start);
                Ok(self.token(TokenKind::Number, start))
            }
            '.' if next.is_some_and(|b| b.is_ascii_digit()) => {
                self.number(start);
                Ok(self.token(TokenKind::Number, start))
            }
            c if is_ident_start(c) => {
                let mut end = start;
                while self
                    .byte(end)
                    .is_some_and(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'$')
                {
                    end += 1;
                }
                if self.byte(end).is_some_and(|b| !b.is_ascii()) {
                    for (i, ch) in self.src[end..].char_indices() {
                        if !is_ident_continue(ch) {
                            end += i;
                            break;
                        }
                        if end + i + ch.len_utf8() == self.src.len() {
                            end = self.src.len();
                            break;
                        }
                    }
                }
                self.pos = end;
                let kind = if is_keyword(&self.src[start..end]) {
                    TokenKind::Keyword
                } else {
                    TokenKind::Identifier
                };
                Ok(self.token(kind, start))
            }
            _ => Ok(self.symbol(start)),
        };
        Some(result)
    }

    fn symbol(&mut self, start: usize) -> Token<'a> {
        let rest = &self.src[start..];
        // No operator starts with a bracket or separator.
        if matches!(rest.as_bytes()[0], b'(' | b')' | b'{' | b'}' | b'[' | b']' | b';' | b',') {
            self.pos = start + 1;
            return self.token(TokenKind::Punct, start);
        }
        if rest.starts_with("...") {
            self.pos = start + 3;
            return self.token(TokenKind::Punct, start);
        }
        let first = rest.as_bytes()[0];
        for op in OPERATORS {
            if op.as_bytes()[0] == first && rest.starts_with(op) {
                // `a ?.5 : b` is a conditional followed by a number.
                if *op == "?." && self.byte(start + 2).is_some_and(|b| b.is_ascii_digit()) {
                    continue;
                }
                self.pos = start + op.len();
                return self.token(TokenKind::Operator, start);
            }
        }
        let c = rest.chars().next().unwrap_or_default();
        self.pos = start + c.len_utf8();
        self.token(TokenKind::Punct, start)
    }

    /// Regular (possibly `$`-interpolated) string starting at `quote`.
    fn string(&mut self, start: usize, quote: usize) -> Result<Token<'a>, LexError> {
        if self.src[quote..].starts_with("\"\"\"") {
            return match self.src[quote + 3..].find("\"\"\"") {
                Some(i) => {
                    // A text block may end with extra quotes: `""""` closes on the last three.
                    let mut end = quote + 3 + i + 3;
                    while self.byte(end) == Some(b'"') {
                        end += 1;
                    }
                    self.pos = end;
                    Ok(self.token(TokenKind::StringLit, start))
                }
                None => Err(LexError::UnterminatedString { offset: start }),
            };
        }
        let mut i = quote + 1;
        while let Some(b) = self.byte(i) {
            match b {
                b'\\' => i += 2,
                b'"' => {
                    self.pos = i + 1;
                    return Ok(self.token(TokenKind::StringLit, start));
                }
                b'\n' => break,
                _ => i += 1,
            }
        }
        Err(LexError::UnterminatedString { offset: start })
    }

    /// C# verbatim string: newlines allowed, `""` escapes a quote.
    fn verbatim_string(&mut self, start: usize, quote: usize) -> Result<Token<'a>, LexError> {
        let mut i = quote + 1;
        while let Some(b) = self.byte(i) {
            if b == b'"' {
                if self.byte(i + 1) == Some(b'"') {
                    i += 2;
                    continue;
                }
                self.pos = i + 1;
                return Ok(self.token(TokenKind::StringLit, start));
            }
            i += 1;
        }
        Err(LexError::UnterminatedString { offset: start })
    }

    fn char_lit(&mut self, start: usize) -> Result<Token<'a>, LexError> {
        let mut i = start + 1;
        while let Some(b) = self.byte(i) {
            match b {
                b'\\' => i += 2,
                b'\'' => {
                    if i == start + 1 {
                        break;
                    }
                    self.pos = i + 1;
                    return Ok(self.token(TokenKind::CharLit, start));
                }
                b'\n' => break,
                _ => i += 1,
            }
        }
        Err(LexError::UnterminatedChar { offset: start })
    }

    fn number(&mut self, start: usize) {
        let b = self.bytes;
        let mut i = start;
        let radix_prefix = b[i] == b'0'
            && matches!(b.get(i + 1), Some(b'x' | b'X' | b'b' | b'B'))
            && b.get(i + 2).is_some_and(|c| c.is_ascii_hexdigit() || *c == b'_');
        if radix_prefix {
            i += 2;
            while i < b.len() && (b[i].is_ascii_hexdigit() || b[i] == b'_') {
                i += 1;
            }
        } else {
            let digits = |i: &mut usize| {
                while *i < b.len() && (b[*i].is_ascii_digit() || b[*i] == b'_') {
                    *i += 1;
                }
            };
            digits(&mut i);
            if i < b.len() && b[i] == b'.' && b.get(i + 1).is_some_and(|c| c.is_ascii_digit()) {
                i += 1;
                digits(&mut i);
            }
            if i < b.len() && matches!(b[i], b'e' | b'E') {
                let mut j = i + 1;
                if j < b.len() && matches!(b[j], b'+' | b'-') {
                    j += 1;
                }
                if j < b.len() && b[j].is_ascii_digit() {
                    i = j;
                    digits(&mut i);
                }
            }
        }
        while i < b.len() && matches!(b[i], b'l' | b'L' | b'f' | b'F' | b'd' | b'D' | b'm' | b'M' | b'u' | b'U')
        {
            i += 1;
        }
        self.pos = i;
    }
}

/// Lexes `code` and returns every token including comments.
pub fn tokenize_with_comments(code: &str) -> Result<Vec<Token<'_>>, LexError> {
    let mut lexer = Lexer {
        src: code,
        bytes: code.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    while let Some(tok) = lexer.next_token() {
        out.push(tok?);
    }
    Ok(out)
}

/// Lexes `code`, dropping comments.
pub fn tokenize(code: &str) -> Result<Vec<Token<'_>>, LexError> {
    let mut tokens = tokenize_with_comments(code)?;
    tokens.retain(|t| t.kind != TokenKind::Comment);
    Ok(tokens)
}

/// Number of non-comment tokens: the complexity property of a program.
pub fn token_size(code: &str) -> Result<usize, LexError> {
    tokenize(code).map(|t| t.len())
}

/// Token texts only, for comparisons that ignore layout.
pub fn token_texts(code: &str) -> Result<Vec<&str>, LexError> {
    tokenize(code).map(|t| t.into_iter().map(|t| t.text).collect())
}
