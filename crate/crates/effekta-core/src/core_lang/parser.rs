//! Parser and desugarer for the surface grammar.
//!
//! ```text
//! value  ::= ident | "unit" | "true" | "false" | nat | "succ" "(" value ")"
//!          | "rec" ident "(" ident ":" type ")" ":" type "!" effexpr "=" expr
//!          | "fun" "(" ident ":" type ")" ":" type "!" effexpr "->" expr
//!          | "(" value ")"
//! expr   ::= value value | ident "(" value,* ")" | "return" value
//!          | "do" ident "<-" expr ";" expr | expr ";" expr
//!          | "if" value "then" expr "else" expr | prim "(" value ")"
//!          | "with" handler "handle" expr | "(" expr ")"
//! handler::= "{" clause,* ";" "finally" ident "->" expr "}"
//! clause ::= ident "(" ident,* ")" ("=c" | "=s") "->" expr
//! type   ::= "Nat" | "Bool" | "Unit" | "Bot" | type "-[" effexpr "]->" type
//! ```
//!
//! Sugar expanded during parsing: `e1; e2` becomes `do` with a fresh unused
//! binder, `fun` becomes a recursive function with a fresh unused name,
//! decimal literals become iterated successors, and `//` starts a line
//! comment. An identifier followed by `(` is an operation call when the
//! identifier is a declared operation, and an application to a parenthesized
//! value otherwise. A bare value is not an expression; the computation that
//! yields it is written `return v`.

use thiserror::Error;

use crate::effect_algebra::automaton::compile;
use crate::effect_algebra::expr::{parse_effect_expr_prefix, EffectExpr};
use crate::effect_algebra::ClauseMode;
use crate::type_system::types::Type;

use super::ast::{Clause, Expression, Handler, PrimOp, Program, SignatureTable, Value};
use super::subst::fresh_name;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

const KEYWORDS: &[&str] = &[
    "unit", "true", "false", "rec", "fun", "return", "do", "if", "then", "else", "with", "handle",
    "finally", "pred", "iszero", "even", "succ",
];

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    sigs: &'a SignatureTable,
}

impl<'a> Parser<'a> {
    fn err_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let mut line = 1;
        let mut col = 1;
        for &c in &self.src[..pos.min(self.src.len())] {
            if c == b'\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        self.err_at(self.pos, message)
    }

    fn skip_ws(&mut self) {
        loop {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.src[self.pos..].starts_with(b"//") {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                return;
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    /// The identifier-shaped token at the cursor, without consuming it.
    fn peek_word(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        let first = *self.src.get(start)?;
        if !(first.is_ascii_alphabetic() || first == b'_') {
            return None;
        }
        let mut end = start + 1;
        while self
            .src
            .get(end)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_' || *c == b'\'')
        {
            end += 1;
        }
        std::str::from_utf8(&self.src[start..end]).ok()
    }

    fn take_word(&mut self) -> Option<&'a str> {
        let w = self.peek_word()?;
        self.pos += w.len();
        Some(w)
    }

    /// Consumes `word` if it is the next token.
    fn eat_word(&mut self, word: &str) -> bool {
        if self.peek_word() == Some(word) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn expect_word(&mut self, word: &str) -> Result<(), ParseError> {
        if self.eat_word(word) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{word}`")))
        }
    }

    /// Consumes the symbol `sym` if the input continues with it.
    fn eat_sym(&mut self, sym: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(sym.as_bytes()) {
            self.pos += sym.len();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, sym: &str) -> Result<(), ParseError> {
        if self.eat_sym(sym) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{sym}`")))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek_word() {
            Some(w) if !KEYWORDS.contains(&w) => {
                self.pos += w.len();
                Ok(w.to_string())
            }
            Some(w) => Err(self.err(format!("`{w}` is a keyword, not an identifier"))),
            None => Err(self.err("expected an identifier")),
        }
    }

    fn effect(&mut self) -> Result<EffectExpr, ParseError> {
        self.skip_ws();
        let text = std::str::from_utf8(self.src).map_err(|_| self.err("invalid UTF-8"))?;
        let (e, end) = parse_effect_expr_prefix(text, self.pos)
            .map_err(|e| self.err_at(e.offset, e.message))?;
        self.pos = end;
        Ok(e)
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let base = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let t = self.ty()?;
                self.expect_sym(")")?;
                t
            }
            _ => match self.take_word() {
                Some("Nat") => Type::Nat,
                Some("Bool") => Type::Bool,
                Some("Unit") => Type::Unit,
                Some("Bot") => Type::Bot,
                _ => return Err(self.err("expected a type")),
            },
        };
        self.skip_ws();
        if self.eat_sym("-[") {
            let eff = self.effect()?;
            self.expect_sym("]->")?;
            let result = self.ty()?;
            Ok(Type::arrow(base, compile(&eff), result))
        } else {
            Ok(base)
        }
    }

    fn nat(&mut self) -> Result<Value, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a numeral"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let n: u64 = text
            .parse()
            .map_err(|_| self.err_at(start, "numeral too large"))?;
        Ok(Value::numeral(n))
    }

    fn value(&mut self) -> Result<Value, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.value()?;
                self.expect_sym(")")?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => self.nat(),
            _ => match self.peek_word() {
                Some("unit") => {
                    self.pos += 4;
                    Ok(Value::Unit)
                }
                Some("true") => {
                    self.pos += 4;
                    Ok(Value::True)
                }
                Some("false") => {
                    self.pos += 5;
                    Ok(Value::False)
                }
                Some("succ") => {
                    self.pos += 4;
                    self.expect_sym("(")?;
                    let v = self.value()?;
                    self.expect_sym(")")?;
                    Ok(Value::Succ(Box::new(v)))
                }
                Some("rec") => {
                    self.pos += 3;
                    let fun_name = self.ident()?;
                    let (param, param_type, result_type, latent) = self.fun_header()?;
                    self.expect_sym("=")?;
                    let body = self.expr()?;
                    Ok(Value::RecFun {
                        fun_name,
                        param,
                        param_type,
                        result_type,
                        latent,
                        body: Box::new(body),
                    })
                }
                Some("fun") => {
                    self.pos += 3;
                    let (param, param_type, result_type, latent) = self.fun_header()?;
                    self.expect_sym("->")?;
                    let body = self.expr()?;
                    Ok(Value::RecFun {
                        fun_name: fresh_name("fun"),
                        param,
                        param_type,
                        result_type,
                        latent,
                        body: Box::new(body),
                    })
                }
                _ => {
                    let name = self.ident().map_err(|_| {
                        self.err("expected a value")
                    })?;
                    Ok(Value::Var(name))
                }
            },
        }
    }

    /// `"(" x ":" T ")" ":" T' "!" effexpr`, shared by `rec` and `fun`.
    fn fun_header(&mut self) -> Result<(String, Type, Type, EffectExpr), ParseError> {
        self.expect_sym("(")?;
        let param = self.ident()?;
        self.expect_sym(":")?;
        let param_type = self.ty()?;
        self.expect_sym(")")?;
        self.expect_sym(":")?;
        let result_type = self.ty()?;
        self.expect_sym("!")?;
        let latent = self.effect()?;
        Ok((param, param_type, result_type, latent))
    }

    /// Full expression: a chain of core expressions glued by `;`, desugared
    /// into `do` with fresh binders (right-associated).
    fn expr(&mut self) -> Result<Expression, ParseError> {
        let first = self.expr_core()?;
        let save = self.pos;
        self.skip_ws();
        if self.src.get(self.pos) == Some(&b';') {
            self.pos += 1;
            if self.peek_word() == Some("finally") {
                // The `;` belongs to the enclosing handler.
                self.pos = save;
                return Ok(first);
            }
            let rest = self.expr()?;
            return Ok(Expression::Do {
                binder: fresh_name("seq"),
                first: Box::new(first),
                rest: Box::new(rest),
            });
        }
        self.pos = save;
        Ok(first)
    }

    fn expr_core(&mut self) -> Result<Expression, ParseError> {
        match self.peek_word() {
            Some("return") => {
                self.pos += 6;
                Ok(Expression::Return(self.value()?))
            }
            Some("do") => {
                self.pos += 2;
                let binder = self.ident()?;
                self.expect_sym("<-")?;
                let first = self.expr_core()?;
                self.expect_sym(";")?;
                let rest = self.expr()?;
                Ok(Expression::Do {
                    binder,
                    first: Box::new(first),
                    rest: Box::new(rest),
                })
            }
            Some("if") => {
                self.pos += 2;
                let cond = self.value()?;
                self.expect_word("then")?;
                let then_branch = self.expr()?;
                self.expect_word("else")?;
                let else_branch = self.expr()?;
                Ok(Expression::If {
                    cond,
                    then_branch: Box::new(then_branch),
                    else_branch: Box::new(else_branch),
                })
            }
            Some("with") => {
                self.pos += 4;
                let handler = self.handler()?;
                self.expect_word("handle")?;
                let body = self.expr()?;
                Ok(Expression::With {
                    handler,
                    body: Box::new(body),
                })
            }
            Some(w) if PrimOp::from_name(w).is_some() => {
                let op = PrimOp::from_name(w).unwrap();
                self.pos += w.len();
                self.expect_sym("(")?;
                let arg = self.value()?;
                self.expect_sym(")")?;
                Ok(Expression::Prim { op, arg })
            }
            Some(w) if !KEYWORDS.contains(&w) && self.sigs.contains_key(w) => {
                let op = w.to_string();
                self.pos += w.len();
                self.expect_sym("(")?;
                let mut args = Vec::new();
                if self.peek() != Some(b')') {
                    loop {
                        args.push(self.value()?);
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.expect_sym(")")?;
                Ok(Expression::OpCall { op, args })
            }
            _ => {
                // Application `value value`, or a parenthesized expression.
                let save = self.pos;
                match self.value().and_then(|v1| {
                    let v2 = self.value().map_err(|_| {
                        self.err(
                            "expected a value to apply; a bare value is not an \
                             expression (write `return v`)",
                        )
                    })?;
                    Ok(Expression::App(v1, v2))
                }) {
                    Ok(app) => Ok(app),
                    Err(e) => {
                        self.pos = save;
                        if self.peek() == Some(b'(') {
                            let inner_save = self.pos;
                            self.pos += 1;
                            match self.expr().and_then(|e| {
                                self.expect_sym(")")?;
                                Ok(e)
                            }) {
                                Ok(e) => Ok(e),
                                Err(_) => {
                                    self.pos = inner_save;
                                    Err(e)
                                }
                            }
                        } else {
                            Err(e)
                        }
                    }
                }
            }
        }
    }

    fn handler(&mut self) -> Result<Handler, ParseError> {
        self.expect_sym("{")?;
        let mut clauses = Vec::new();
        if self.peek_word() != Some("finally") {
            // Optional leading `;` covers the zero-clause form `{ ; finally … }`.
            if self.peek() != Some(b';') {
                loop {
                    clauses.push(self.clause()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            }
            self.expect_sym(";")?;
        }
        self.expect_word("finally")?;
        let final_binder = self.ident()?;
        self.expect_sym("->")?;
        let final_expr = self.expr()?;
        self.expect_sym("}")?;
        Ok(Handler {
            clauses,
            final_binder,
            final_expr: Box::new(final_expr),
        })
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        let op = self.ident()?;
        self.expect_sym("(")?;
        let mut params = Vec::new();
        if self.peek() != Some(b')') {
            loop {
                params.push(self.ident()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.expect_sym(")")?;
        self.expect_sym("=")?;
        let mode = if self.eat_sym("c") {
            ClauseMode::Continue
        } else if self.eat_sym("s") {
            ClauseMode::Stop
        } else {
            return Err(self.err("expected clause mode `=c` or `=s`"));
        };
        self.expect_sym("->")?;
        let body = self.expr()?;
        Ok(Clause {
            op,
            params,
            body,
            mode,
        })
    }
}

/// Parses a program against a table of declared operations. The table is
/// needed during parsing to tell operation calls apart from applications, and
/// afterwards to check arities and clause well-formedness.
pub fn parse_program(text: &str, signatures: &SignatureTable) -> Result<Program, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        sigs: signatures,
    };
    let main = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("trailing input after expression"));
    }
    validate(&main, signatures).map_err(|m| p.err_at(0, m))?;
    Ok(Program {
        signatures: signatures.clone(),
        main,
    })
}

/// Parses a single expression (used for trace round-trip checks).
pub fn parse_expression(text: &str, signatures: &SignatureTable) -> Result<Expression, ParseError> {
    parse_program(text, signatures).map(|p| p.main)
}

/// Checks operation usage: declared names, matching arities, distinct clause
/// operations, and clause parameter counts.
fn validate(e: &Expression, sigs: &SignatureTable) -> Result<(), String> {
    match e {
        Expression::OpCall { op, args } => {
            let sig = sigs
                .get(op)
                .ok_or_else(|| format!("undeclared operation `{op}`"))?;
            if sig.arg_types.len() != args.len() {
                return Err(format!(
                    "operation `{op}` takes {} argument(s), called with {}",
                    sig.arg_types.len(),
                    args.len()
                ));
            }
            for a in args {
                validate_value(a, sigs)?;
            }
            Ok(())
        }
        Expression::App(v1, v2) => {
            validate_value(v1, sigs)?;
            validate_value(v2, sigs)
        }
        Expression::Return(v) | Expression::Prim { arg: v, .. } => validate_value(v, sigs),
        Expression::Do { first, rest, .. } => {
            validate(first, sigs)?;
            validate(rest, sigs)
        }
        Expression::If {
            cond,
            then_branch,
            else_branch,
        } => {
            validate_value(cond, sigs)?;
            validate(then_branch, sigs)?;
            validate(else_branch, sigs)
        }
        Expression::With { handler, body } => {
            let mut seen = std::collections::BTreeSet::new();
            for c in &handler.clauses {
                if !seen.insert(&c.op) {
                    return Err(format!("duplicate clause for operation `{}`", c.op));
                }
                let sig = sigs
                    .get(&c.op)
                    .ok_or_else(|| format!("clause for undeclared operation `{}`", c.op))?;
                if sig.arg_types.len() != c.params.len() {
                    return Err(format!(
                        "clause for `{}` binds {} parameter(s), operation takes {}",
                        c.op,
                        c.params.len(),
                        sig.arg_types.len()
                    ));
                }
                validate(&c.body, sigs)?;
            }
            validate(&handler.final_expr, sigs)?;
            validate(body, sigs)
        }
    }
}

fn validate_value(v: &Value, sigs: &SignatureTable) -> Result<(), String> {
    match v {
        Value::RecFun { body, .. } => validate(body, sigs),
        Value::Succ(inner) => validate_value(inner, sigs),
        _ => Ok(()),
    }
}
