//! Syntax of effect expressions.
//!
//! An effect expression denotes a non-empty set of finite or infinite
//! sequences of operation names:
//!
//! ```text
//! e ::= eps | op | e1 . e2 | e1 | e2 | e* | e^w | ( e )
//! ```
//!
//! Postfix `*` (finite iteration) and `^w` (infinite iteration) bind tighter
//! than `.` (composition), which binds tighter than `|` (union).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An effect expression. Every constructor preserves non-emptiness of the
/// denoted language, so any `EffectExpr` denotes a non-empty set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EffectExpr {
    /// The singleton `{ε}`: the empty sequence of operations.
    Eps,
    /// A single operation name.
    Atom(String),
    /// Composition `{α·β | α ∈ e1, β ∈ e2}`; infinite α absorb β.
    Concat(Box<EffectExpr>, Box<EffectExpr>),
    /// Set union.
    Union(Box<EffectExpr>, Box<EffectExpr>),
    /// All finite iterations `eⁿ` for `n ≥ 0`.
    Star(Box<EffectExpr>),
    /// All infinite concatenations of non-ε elements of `e`
    /// (`{ε}` exactly when `e = {ε}`).
    Omega(Box<EffectExpr>),
}

impl EffectExpr {
    pub fn atom(name: impl Into<String>) -> Self {
        EffectExpr::Atom(name.into())
    }

    pub fn concat(a: EffectExpr, b: EffectExpr) -> Self {
        EffectExpr::Concat(Box::new(a), Box::new(b))
    }

    pub fn union(a: EffectExpr, b: EffectExpr) -> Self {
        EffectExpr::Union(Box::new(a), Box::new(b))
    }

    pub fn star(e: EffectExpr) -> Self {
        EffectExpr::Star(Box::new(e))
    }

    pub fn omega(e: EffectExpr) -> Self {
        EffectExpr::Omega(Box::new(e))
    }
}

impl fmt::Display for EffectExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Precedence levels: 0 union, 1 concat, 2 postfix/atoms.
        fn go(e: &EffectExpr, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let level = match e {
                EffectExpr::Union(..) => 0,
                EffectExpr::Concat(..) => 1,
                _ => 2,
            };
            let parens = level < prec;
            if parens {
                write!(f, "(")?;
            }
            match e {
                EffectExpr::Eps => write!(f, "eps")?,
                EffectExpr::Atom(op) => write!(f, "{op}")?,
                EffectExpr::Concat(a, b) => {
                    go(a, 1, f)?;
                    write!(f, " . ")?;
                    go(b, 2, f)?;
                }
                EffectExpr::Union(a, b) => {
                    go(a, 0, f)?;
                    write!(f, " | ")?;
                    go(b, 1, f)?;
                }
                EffectExpr::Star(a) => {
                    go(a, 3, f)?;
                    write!(f, "*")?;
                }
                EffectExpr::Omega(a) => {
                    go(a, 3, f)?;
                    write!(f, "^w")?;
                }
            }
            if parens {
                write!(f, ")")?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("effect expression syntax error at offset {offset}: {message}")]
pub struct EffectParseError {
    pub offset: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, message: impl Into<String>) -> EffectParseError {
        EffectParseError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_' || *c == b'\'')
        {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            Some(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
        }
    }

    fn union(&mut self) -> Result<EffectExpr, EffectParseError> {
        let mut e = self.concat()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            let rhs = self.concat()?;
            e = EffectExpr::union(e, rhs);
        }
        Ok(e)
    }

    fn concat(&mut self) -> Result<EffectExpr, EffectParseError> {
        let mut e = self.postfix()?;
        while self.peek() == Some(b'.') {
            self.pos += 1;
            let rhs = self.postfix()?;
            e = EffectExpr::concat(e, rhs);
        }
        Ok(e)
    }

    fn postfix(&mut self) -> Result<EffectExpr, EffectParseError> {
        let mut e = self.primary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    e = EffectExpr::star(e);
                }
                Some(b'^') => {
                    self.pos += 1;
                    if self.src.get(self.pos) == Some(&b'w') {
                        self.pos += 1;
                        e = EffectExpr::omega(e);
                    } else {
                        return Err(self.err("expected `w` after `^`"));
                    }
                }
                _ => return Ok(e),
            }
        }
    }

    fn primary(&mut self) -> Result<EffectExpr, EffectParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.union()?;
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    Ok(e)
                } else {
                    Err(self.err("expected `)`"))
                }
            }
            _ => match self.ident() {
                Some(id) if id == "eps" => Ok(EffectExpr::Eps),
                Some(id) => Ok(EffectExpr::Atom(id)),
                None => Err(self.err("expected `eps`, an operation name, or `(`")),
            },
        }
    }
}

/// Parses the concrete effect-expression syntax.
pub fn parse_effect_expr(text: &str) -> Result<EffectExpr, EffectParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.union()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input after effect expression"));
    }
    Ok(e)
}

/// Parses an effect expression inside a larger token stream, starting at
/// `offset` in `text`; returns the expression and the position one past it.
/// Used by the surface-language parser, where an effect annotation is
/// followed by `=`, `->`, or `]`.
pub fn parse_effect_expr_prefix(
    text: &str,
    offset: usize,
) -> Result<(EffectExpr, usize), EffectParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: offset,
    };
    let e = p.union()?;
    p.skip_ws();
    Ok((e, p.pos))
}
