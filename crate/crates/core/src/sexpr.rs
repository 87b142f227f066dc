//! A small s-expression reader shared by the language, model, syntax and
//! diagram file formats.
//!
//! Atoms are symbols (anything that is not whitespace, a paren, or a quote),
//! keywords (symbols starting with `:`), and double-quoted strings. `;`
//! starts a comment that runs to the end of the line.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, usize),
    Str(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    /// 1-based source line where this expression starts.
    pub fn line(&self) -> usize {
        match self {
            Sexp::Atom(_, l) | Sexp::Str(_, l) | Sexp::List(_, l) => *l,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            _ => None,
        }
    }

    /// The atom at the head of a list form, if any.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(Sexp::as_atom)
    }

    pub fn expect_atom(&self, what: &str) -> Result<&str> {
        self.as_atom()
            .ok_or_else(|| Error::parse(self.line(), format!("expected {what}, found {self}")))
    }

    pub fn expect_list(&self, what: &str) -> Result<&[Sexp]> {
        self.as_list()
            .ok_or_else(|| Error::parse(self.line(), format!("expected {what}, found {self}")))
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s, _) => f.write_str(s),
            Sexp::Str(s, _) => write!(f, "{s:?}"),
            Sexp::List(items, _) => {
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

/// Parse every top-level form in `src`.
pub fn parse_all(src: &str) -> Result<Vec<Sexp>> {
    let mut reader = Reader { chars: src.chars().peekable(), line: 1 };
    let mut out = Vec::new();
    loop {
        reader.skip_ws();
        match reader.chars.peek() {
            None => return Ok(out),
            Some(')') => return Err(Error::parse(reader.line, "unbalanced ')'")),
            Some(_) => out.push(reader.read()?),
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next();
        if c == Some('\n') {
            self.line += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp> {
        self.skip_ws();
        let line = self.line;
        match self.chars.peek().copied() {
            None => Err(Error::parse(line, "unexpected end of input")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.chars.peek() {
                        None => return Err(Error::parse(line, "unclosed '('")),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, line));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(')') => Err(Error::parse(line, "unexpected ')'")),
            Some('"') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(Error::parse(line, "unterminated string")),
                        Some('"') => return Ok(Sexp::Str(s, line)),
                        Some('\\') => match self.bump() {
                            Some('n') => s.push('\n'),
                            Some(c) => s.push(c),
                            None => return Err(Error::parse(line, "unterminated string")),
                        },
                        Some(c) => s.push(c),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '"' || c == ';' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom(s, line))
            }
        }
    }
}

/// Split `(head positional... :key value ...)` into positionals and keyword
/// arguments. Keyword values are single forms.
pub fn keyword_args(items: &[Sexp]) -> Result<(Vec<&Sexp>, Vec<(&str, &Sexp)>)> {
    let mut pos = Vec::new();
    let mut kw = Vec::new();
    let mut i = 0;
    while i < items.len() {
        match items[i].as_atom() {
            Some(k) if k.starts_with(':') && k.len() > 1 => {
                let v = items
                    .get(i + 1)
                    .ok_or_else(|| Error::parse(items[i].line(), format!("missing value for {k}")))?;
                kw.push((&k[1..], v));
                i += 2;
            }
            _ => {
                pos.push(&items[i]);
                i += 1;
            }
        }
    }
    Ok((pos, kw))
}
