//! Minimal s-expression reader for solver output.

use std::fmt::{self, Display, Formatter};

use thiserror::Error;

const MAX_DEPTH: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    /// Symbol or numeral. `|quoted|` symbols are stored without the bars.
    Atom(String),
    /// String literal, unescaped.
    Str(String),
    List(Vec<Sexp>),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("offset {offset}: {message}")]
pub struct SexpError {
    pub offset: usize,
    pub message: String,
}

impl Sexp {
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(l) => Some(l),
            _ => None,
        }
    }
}

impl Display for Sexp {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => {
                let simple = !a.is_empty()
                    && a.chars()
                        .all(|c| !c.is_whitespace() && !"()|\";".contains(c));
                if simple {
                    f.write_str(a)
                } else {
                    write!(f, "|{a}|")
                }
            }
            Sexp::Str(s) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            Sexp::List(items) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

impl Reader<'_> {
    fn err(&self, message: impl Into<String>) -> SexpError {
        SexpError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            match bytes[self.pos] {
                b';' => {
                    while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn read(&mut self, depth: usize) -> Result<Sexp, SexpError> {
        if depth > MAX_DEPTH {
            return Err(self.err("nesting too deep"));
        }
        self.skip_trivia();
        let rest = &self.src[self.pos..];
        let Some(c) = rest.chars().next() else {
            return Err(self.err("unexpected end of input"));
        };
        match c {
            '(' => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.src[self.pos..].chars().next() {
                        None => return Err(self.err("unclosed list")),
                        Some(')') => {
                            self.pos += 1;
                            return Ok(Sexp::List(items));
                        }
                        Some(_) => items.push(self.read(depth + 1)?),
                    }
                }
            }
            ')' => Err(self.err("unexpected `)`")),
            '|' => {
                let Some(end) = rest[1..].find('|') else {
                    return Err(self.err("unterminated quoted symbol"));
                };
                let sym = rest[1..1 + end].to_string();
                self.pos += end + 2;
                Ok(Sexp::Atom(sym))
            }
            '"' => {
                let mut out = String::new();
                let mut chars = rest.char_indices().skip(1).peekable();
                while let Some((i, ch)) = chars.next() {
                    if ch == '"' {
                        if let Some(&(_, '"')) = chars.peek() {
                            chars.next();
                            out.push('"');
                            continue;
                        }
                        self.pos += i + 1;
                        return Ok(Sexp::Str(out));
                    }
                    out.push(ch);
                }
                Err(self.err("unterminated string"))
            }
            _ => {
                let len = rest
                    .find(|c: char| c.is_whitespace() || "()|\";".contains(c))
                    .unwrap_or(rest.len());
                self.pos += len;
                Ok(Sexp::Atom(rest[..len].to_string()))
            }
        }
    }
}

/// Reads every s-expression in `src`.
pub fn read_all(src: &str) -> Result<Vec<Sexp>, SexpError> {
    let mut r = Reader { src, pos: 0 };
    let mut out = Vec::new();
    loop {
        r.skip_trivia();
        if r.pos >= src.len() {
            return Ok(out);
        }
        out.push(r.read(0)?);
    }
}

/// Reads exactly one s-expression.
pub fn read_one(src: &str) -> Result<Sexp, SexpError> {
    let mut r = Reader { src, pos: 0 };
    let e = r.read(0)?;
    r.skip_trivia();
    if r.pos < src.len() {
        return Err(r.err("trailing input"));
    }
    Ok(e)
}
