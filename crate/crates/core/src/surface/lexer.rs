use std::fmt;

use crate::span::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    // keywords
    Type,
    Fun,
    Val,
    Let,
    In,
    If,
    Then,
    Else,
    Match,
    With,
    Zero,
    Suc,
    Fn,
    Auto,
    True,
    False,
    Nat,
    IntTy,
    Bool,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Bar,
    OrOr,
    AndAnd,
    Bang,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    FatArrow,
    Arrow,
    Plus,
    Minus,
    Star,
    Eof,
}

impl Tok {
    /// How the token is named in "expected ..." messages.
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(_) => "identifier".into(),
            Tok::Int(_) => "integer".into(),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other),
        }
    }
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return f.write_str(s),
            Tok::Int(n) => return write!(f, "{n}"),
            Tok::Type => "type",
            Tok::Fun => "fun",
            Tok::Val => "val",
            Tok::Let => "let",
            Tok::In => "in",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::Match => "match",
            Tok::With => "with",
            Tok::Zero => "zero",
            Tok::Suc => "suc",
            Tok::Fn => "fn",
            Tok::Auto => "auto",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Nat => "Nat",
            Tok::IntTy => "Int",
            Tok::Bool => "Bool",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Bar => "|",
            Tok::OrOr => "||",
            Tok::AndAnd => "&&",
            Tok::Bang => "!",
            Tok::Assign => "=",
            Tok::EqEq => "==",
            Tok::NotEq => "/=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::FatArrow => "=>",
            Tok::Arrow => "->",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Eof => "<eof>",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub offset: usize,
    pub message: String,
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "type" => Tok::Type,
        "fun" => Tok::Fun,
        "val" => Tok::Val,
        "let" => Tok::Let,
        "in" => Tok::In,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "match" => Tok::Match,
        "with" => Tok::With,
        "zero" => Tok::Zero,
        "suc" => Tok::Suc,
        "fn" => Tok::Fn,
        "auto" => Tok::Auto,
        "true" => Tok::True,
        "false" => Tok::False,
        "Nat" => Tok::Nat,
        "Int" => Tok::IntTy,
        "Bool" => Tok::Bool,
        _ => return None,
    })
}

pub fn is_keyword(s: &str) -> bool {
    keyword(s).is_some()
}

/// Splits `source` into tokens, ending with a single `Eof`.
/// `--` starts a comment running to the end of the line.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let bytes = source.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'-' && bytes.get(i + 1) == Some(&b'-') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &source[start..i];
            let tok = keyword(word).unwrap_or_else(|| Tok::Ident(word.to_string()));
            out.push(Token {
                tok,
                span: Span::new(start, i),
            });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: i64 = source[start..i].parse().map_err(|_| LexError {
                offset: start,
                message: "integer literal out of range".into(),
            })?;
            out.push(Token {
                tok: Tok::Int(n),
                span: Span::new(start, i),
            });
            continue;
        }
        let two = bytes.get(i + 1).copied();
        let (tok, len) = match (c, two) {
            (b'|', Some(b'|')) => (Tok::OrOr, 2),
            (b'&', Some(b'&')) => (Tok::AndAnd, 2),
            (b'=', Some(b'=')) => (Tok::EqEq, 2),
            (b'=', Some(b'>')) => (Tok::FatArrow, 2),
            (b'/', Some(b'=')) => (Tok::NotEq, 2),
            (b'<', Some(b'=')) => (Tok::Le, 2),
            (b'>', Some(b'=')) => (Tok::Ge, 2),
            (b'-', Some(b'>')) => (Tok::Arrow, 2),
            (b'(', _) => (Tok::LParen, 1),
            (b')', _) => (Tok::RParen, 1),
            (b'{', _) => (Tok::LBrace, 1),
            (b'}', _) => (Tok::RBrace, 1),
            (b',', _) => (Tok::Comma, 1),
            (b':', _) => (Tok::Colon, 1),
            (b';', _) => (Tok::Semi, 1),
            (b'|', _) => (Tok::Bar, 1),
            (b'!', _) => (Tok::Bang, 1),
            (b'=', _) => (Tok::Assign, 1),
            (b'<', _) => (Tok::Lt, 1),
            (b'>', _) => (Tok::Gt, 1),
            (b'+', _) => (Tok::Plus, 1),
            (b'-', _) => (Tok::Minus, 1),
            (b'*', _) => (Tok::Star, 1),
            _ => {
                let ch = source[i..].chars().next().unwrap_or('?');
                return Err(LexError {
                    offset: i,
                    message: format!("unexpected character `{}`", ch.escape_default()),
                });
            }
        };
        i += len;
        out.push(Token {
            tok,
            span: Span::new(start, i),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(source.len(), source.len()),
    });
    Ok(out)
}
