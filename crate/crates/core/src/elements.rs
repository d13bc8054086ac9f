//! Language-element detection over the token stream.
//!
//! Elements are recognized with fixed rules instead of a full parse:
//!
//! | element | rule |
//! |---|---|
//! | `else`, `true`, `break`, `for`, `long` | keyword occurrence (`for` covers for-each headers) |
//! | `while_statement` | keyword `while`, except the tail of a `do ... while` |
//! | `floating_point_type` | keyword `float` or `double` |
//! | `>=`, `\|\|` | operator token after maximal munch |
//! | `unary_expression` | `!` or `~`; `-`/`+` when the previous token is an operator (not `++`/`--`), one of `( [ , { ;`, the keywords `return case throw assert`, the `)` of a primitive cast, or nothing |
//! | `array_access` | `[` after an identifier, `]`, `)` or the `}` of an array-creation initializer, unless it is a dimension of an array creation or an empty/comma-only type declarator (`[]`, `[,]`) |
//! | `array_creation_expression` | `new`, a type name (optionally qualified or generic), then `[` |
//! | `conditional_expression` | `?` after an identifier, literal, `this`, `)` or `]`, outside generic argument lists and not a C# nullable declarator (`Foo? x;`) |
//!
//! Comments and literal contents never produce elements because they are
//! single tokens.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::corpus::{basis_text, CodeSample, TaskKind};
use crate::error::Error;
use crate::lexer::{tokenize, LexError, Token, TokenKind};

/// Bumped whenever a kind is added or a detection rule changes.
pub const TAXONOMY_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    Else,
    True,
    FloatingPointType,
    UnaryExpression,
    ArrayAccess,
    WhileStatement,
    Long,
    ArrayCreationExpression,
    Break,
    GeOperator,
    For,
    OrOperator,
    ConditionalExpression,
}

impl ElementKind {
    pub const COUNT: usize = 13;

    /// Taxonomy order; also the tie-break order for rankings.
    pub const ALL: [ElementKind; Self::COUNT] = [
        ElementKind::Else,
        ElementKind::True,
        ElementKind::FloatingPointType,
        ElementKind::UnaryExpression,
        ElementKind::ArrayAccess,
        ElementKind::WhileStatement,
        ElementKind::Long,
        ElementKind::ArrayCreationExpression,
        ElementKind::Break,
        ElementKind::GeOperator,
        ElementKind::For,
        ElementKind::OrOperator,
        ElementKind::ConditionalExpression,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Else => "else",
            ElementKind::True => "true",
            ElementKind::FloatingPointType => "floating_point_type",
            ElementKind::UnaryExpression => "unary_expression",
            ElementKind::ArrayAccess => "array_access",
            ElementKind::WhileStatement => "while_statement",
            ElementKind::Long => "long",
            ElementKind::ArrayCreationExpression => "array_creation_expression",
            ElementKind::Break => "break",
            ElementKind::GeOperator => ">=",
            ElementKind::For => "for",
            ElementKind::OrOperator => "||",
            ElementKind::ConditionalExpression => "conditional_expression",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// The five elements masked per task in the reference experiments.
    pub fn preset(task: TaskKind) -> [ElementKind; 5] {
        use ElementKind::*;
        match task {
            TaskKind::Text2code => [Else, FloatingPointType, UnaryExpression, ArrayAccess, True],
            TaskKind::Refinement => [WhileStatement, Long, ArrayCreationExpression, Break, GeOperator],
            TaskKind::Translation => [For, True, ArrayCreationExpression, OrOperator, ConditionalExpression],
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ElementKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let alias = match s {
            "ge_operator" => Some(ElementKind::GeOperator),
            "or_operator" | "or" => Some(ElementKind::OrOperator),
            "while" => Some(ElementKind::WhileStatement),
            "ternary_expression" => Some(ElementKind::ConditionalExpression),
            _ => None,
        };
        alias
            .or_else(|| ElementKind::ALL.into_iter().find(|k| k.name() == s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown language element {s:?}")))
    }
}

impl Serialize for ElementKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> serde::Deserialize<'de> for ElementKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Occurrence counts per element kind; absent kinds are zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ElementHistogram {
    counts: [usize; ElementKind::COUNT],
}

impl ElementHistogram {
    pub fn get(&self, kind: ElementKind) -> usize {
        self.counts[kind.index()]
    }

    pub fn contains(&self, kind: ElementKind) -> bool {
        self.get(kind) > 0
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn add(&mut self, kind: ElementKind, n: usize) {
        self.counts[kind.index()] += n;
    }

    pub fn iter(&self) -> impl Iterator<Item = (ElementKind, usize)> + '_ {
        ElementKind::ALL.into_iter().map(|k| (k, self.get(k)))
    }

    fn bump(&mut self, kind: ElementKind) {
        self.add(kind, 1);
    }
}

impl std::ops::AddAssign<&ElementHistogram> for ElementHistogram {
    fn add_assign(&mut self, rhs: &ElementHistogram) {
        for (a, b) in self.counts.iter_mut().zip(rhs.counts) {
            *a += b;
        }
    }
}

impl Serialize for ElementHistogram {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let nonzero: Vec<_> = self.iter().filter(|(_, n)| *n > 0).collect();
        let mut map = serializer.serialize_map(Some(nonzero.len()))?;
        for (k, n) in nonzero {
            map.serialize_entry(k.name(), &n)?;
        }
        map.end()
    }
}

const PRIMITIVE_TYPES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "bool", "sbyte",
    "ushort", "uint", "ulong", "decimal", "string",
];

fn is_primitive(tok: &Token<'_>) -> bool {
    tok.kind == TokenKind::Keyword && PRIMITIVE_TYPES.contains(&tok.text)
}

/// Index of the matching closer for every `(`, `[` and `{` (and back).
fn match_brackets(tokens: &[Token<'_>]) -> Vec<Option<usize>> {
    let mut matching = vec![None; tokens.len()];
    let mut stack: Vec<(usize, &str)> = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        if t.kind != TokenKind::Punct {
            continue;
        }
        match t.text {
            "(" | "[" | "{" => stack.push((i, t.text)),
            ")" | "]" | "}" => {
                let open = match t.text {
                    ")" => "(",
                    "]" => "[",
                    _ => "{",
                };
                // Unbalanced closers are ignored; an opener of another kind
                // stays on the stack.
                if let Some(pos) = stack.iter().rposition(|&(_, o)| o == open) {
                    let (j, _) = stack[pos];
                    stack.truncate(pos);
                    matching[i] = Some(j);
                    matching[j] = Some(i);
                }
            }
            _ => {}
        }
    }
    matching
}

/// Marks tokens inside generic argument lists `Name<...>`.
fn generic_spans(tokens: &[Token<'_>]) -> Vec<bool> {
    const MAX_SPAN: usize = 256;
    let mut inside = vec![false; tokens.len()];
    for i in 1..tokens.len() {
        let opens = tokens[i].is_op("<")
            && (tokens[i - 1].kind == TokenKind::Identifier || tokens[i - 1].is_punct("."));
        if !opens || inside[i] {
            continue;
        }
        let mut depth: i32 = 1;
        let mut end = None;
        for (j, t) in tokens.iter().enumerate().skip(i + 1).take(MAX_SPAN) {
            let allowed = match t.kind {
                TokenKind::Identifier => true,
                TokenKind::Keyword => {
                    is_primitive(t) || matches!(t.text, "extends" | "super")
                }
                TokenKind::Punct => matches!(t.text, "," | "." | "[" | "]"),
                TokenKind::Operator => {
                    match t.text {
                        "<" => depth += 1,
                        ">" => depth -= 1,
                        ">>" => depth -= 2,
                        ">>>" => depth -= 3,
                        "?" | "&" => {}
                        _ => break,
                    }
                    true
                }
                _ => false,
            };
            if !allowed || depth < 0 {
                break;
            }
            if depth == 0 {
                end = Some(j);
                break;
            }
        }
        if let Some(end) = end {
            inside[i..=end].iter_mut().for_each(|b| *b = true);
        }
    }
    inside
}

/// Skips a type name starting at `i`; returns the index after it.
fn skip_type(tokens: &[Token<'_>], mut i: usize) -> Option<usize> {
    let first = tokens.get(i)?;
    if first.kind != TokenKind::Identifier && !is_primitive(first) {
        return None;
    }
    i += 1;
    loop {
        match tokens.get(i) {
            Some(t) if (t.is_punct(".") || t.is_op("::"))
                && tokens.get(i + 1).is_some_and(|n| n.kind == TokenKind::Identifier) =>
            {
                i += 2;
            }
            Some(t) if t.is_op("<") => {
                let mut depth: i32 = 0;
                while let Some(t) = tokens.get(i) {
                    match (t.kind, t.text) {
                        (TokenKind::Operator, "<") => depth += 1,
                        (TokenKind::Operator, ">") => depth -= 1,
                        (TokenKind::Operator, ">>") => depth -= 2,
                        (TokenKind::Operator, ">>>") => depth -= 3,
                        (TokenKind::Punct, ";" | "{" | "}" | "(" | ")") => return None,
                        _ => {}
                    }
                    i += 1;
                    if depth <= 0 {
                        break;
                    }
                }
            }
            _ => return Some(i),
        }
    }
}

/// Start indices of `while` tokens that close a `do` statement.
fn do_while_tails(tokens: &[Token<'_>], matching: &[Option<usize>]) -> Vec<bool> {
    let mut tail = vec![false; tokens.len()];
    for (i, t) in tokens.iter().enumerate() {
        if !t.is_keyword("do") {
            continue;
        }
        let body_end = match tokens.get(i + 1) {
            Some(b) if b.is_punct("{") => matching[i + 1],
            Some(_) => {
                // Single-statement body: the first `;` outside brackets.
                let mut depth = 0i32;
                let mut found = None;
                for (j, t) in tokens.iter().enumerate().skip(i + 1) {
                    if t.kind == TokenKind::Punct {
                        match t.text {
                            "(" | "[" | "{" => depth += 1,
                            ")" | "]" | "}" => depth -= 1,
                            ";" if depth == 0 => {
                                found = Some(j);
                                break;
                            }
                            _ => {}
                        }
                    }
                }
                found
            }
            None => None,
        };
        if let Some(end) = body_end {
            if tokens.get(end + 1).is_some_and(|w| w.is_keyword("while")) {
                tail[end + 1] = true;
            }
        }
    }
    tail
}

fn ends_operand(tok: &Token<'_>) -> bool {
    tok.kind == TokenKind::Identifier
        || tok.is_literal()
        || tok.is_keyword("this")
        || tok.is_punct(")")
        || tok.is_punct("]")
}

fn is_primitive_cast_close(tokens: &[Token<'_>], close: usize, matching: &[Option<usize>]) -> bool {
    match matching[close] {
        Some(open) if open + 2 == close => is_primitive(&tokens[open + 1]),
        _ => false,
    }
}

fn sign_is_unary(tokens: &[Token<'_>], i: usize, matching: &[Option<usize>]) -> bool {
    let Some(prev) = i.checked_sub(1).map(|p| &tokens[p]) else {
        return true;
    };
    match prev.kind {
        TokenKind::Operator => !matches!(prev.text, "++" | "--"),
        TokenKind::Punct => match prev.text {
            "(" | "[" | "," | "{" | ";" => true,
            ")" => is_primitive_cast_close(tokens, i - 1, matching),
            _ => false,
        },
        TokenKind::Keyword => matches!(prev.text, "return" | "case" | "throw" | "assert"),
        _ => false,
    }
}

/// `Foo? x;` / `Foo? x = ...` in C# declares a nullable, not a conditional.
fn is_nullable_declarator(tokens: &[Token<'_>], q: usize) -> bool {
    let Some(name) = tokens.get(q + 1) else {
        return true;
    };
    if name.is_punct("[") || name.is_punct(")") || name.is_punct(",") || name.is_op(">") {
        return true;
    }
    name.kind == TokenKind::Identifier
        && tokens
            .get(q + 2)
            .is_some_and(|t| t.is_punct(";") || t.is_op("=") || t.is_punct(",") || t.is_punct(")") || t.is_punct("{"))
}

pub fn extract_elements(tokens: &[Token<'_>]) -> ElementHistogram {
    use ElementKind::*;

    let matching = match_brackets(tokens);
    let in_generic = generic_spans(tokens);
    let do_tails = do_while_tails(tokens, &matching);
    let mut creation_dim = vec![false; tokens.len()];
    // Closing braces of `new T[] { ... }` initializers, which can be indexed.
    let mut initializer_end = vec![false; tokens.len()];
    let mut hist = ElementHistogram::default();

    for (i, t) in tokens.iter().enumerate() {
        match t.kind {
            TokenKind::Keyword => match t.text {
                "else" => hist.bump(Else),
                "true" => hist.bump(True),
                "break" => hist.bump(Break),
                "for" => hist.bump(For),
                "long" => hist.bump(Long),
                "float" | "double" => hist.bump(FloatingPointType),
                "while" if !do_tails[i] => hist.bump(WhileStatement),
                "new" => {
                    let Some(mut j) = skip_type(tokens, i + 1) else {
                        continue;
                    };
                    if tokens.get(j).is_some_and(|b| b.is_punct("[")) {
                        hist.bump(ArrayCreationExpression);
                        while tokens.get(j).is_some_and(|b| b.is_punct("[")) {
                            creation_dim[j] = true;
                            match matching[j] {
                                Some(close) => j = close + 1,
                                None => break,
                            }
                        }
                        if tokens.get(j).is_some_and(|b| b.is_punct("{")) {
                            if let Some(close) = matching[j] {
                                initializer_end[close] = true;
                            }
                        }
                    }
                }
                _ => {}
            },
            TokenKind::Operator => match t.text {
                ">=" => hist.bump(GeOperator),
                "||" => hist.bump(OrOperator),
                "!" | "~" => hist.bump(UnaryExpression),
                "-" | "+" if sign_is_unary(tokens, i, &matching) => hist.bump(UnaryExpression),
                "?" => {
                    let prev_ends = i > 0 && ends_operand(&tokens[i - 1]);
                    if prev_ends && !in_generic[i] && !is_nullable_declarator(tokens, i) {
                        hist.bump(ConditionalExpression);
                    }
                }
                _ => {}
            },
            TokenKind::Punct if t.text == "[" => {
                if creation_dim[i] {
                    continue;
                }
                let declarator = match matching[i] {
                    Some(close) => tokens[i + 1..close].iter().all(|x| x.is_punct(",")),
                    None => tokens.get(i + 1).is_some_and(|x| x.is_punct("]")),
                };
                let after_operand = i > 0 && {
                    let p = &tokens[i - 1];
                    p.kind == TokenKind::Identifier
                        || p.is_punct("]")
                        || p.is_punct(")")
                        || initializer_end[i - 1]
                };
                if after_operand && !declarator {
                    hist.bump(ArrayAccess);
                }
            }
            _ => {}
        }
    }
    hist
}

/// Lexes and extracts in one step.
pub fn elements_of(code: &str) -> Result<ElementHistogram, LexError> {
    tokenize(code).map(|t| extract_elements(&t))
}

/// Whether the sample's basis text contains `kind`: the syntax property test.
pub fn contains_element(sample: &CodeSample, task: TaskKind, kind: ElementKind) -> Result<bool, LexError> {
    elements_of(basis_text(sample, task, None)).map(|h| h.contains(kind))
}
