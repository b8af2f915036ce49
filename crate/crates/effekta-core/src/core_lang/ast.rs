//! Abstract syntax of the fine-grain call-by-value language with algebraic
//! operations and handlers.
//!
//! The grammar is stratified into values and expressions: every position the
//! grammar marks as a value holds a [`Value`], never an [`Expression`].
//! Sequencing, application, and operation calls therefore never contain
//! unevaluated subcomputations except where `Do` explicitly composes them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::effect_algebra::{ClauseMode, EffectExpr};
use crate::type_system::types::Type;

/// Built-in pure operations on naturals. Each reduces in one step to a
/// `Return` of the computed value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimOp {
    Pred,
    IsZero,
    Even,
}

impl PrimOp {
    pub fn name(self) -> &'static str {
        match self {
            PrimOp::Pred => "pred",
            PrimOp::IsZero => "iszero",
            PrimOp::Even => "even",
        }
    }

    pub fn from_name(name: &str) -> Option<PrimOp> {
        match name {
            "pred" => Some(PrimOp::Pred),
            "iszero" => Some(PrimOp::IsZero),
            "even" => Some(PrimOp::Even),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Var(String),
    /// `rec f(x: T): T' ! ε = e` — a recursive function with a full
    /// annotation: parameter type, result type, and latent effect. The latent
    /// effect is kept as the expression the annotation was written in.
    RecFun {
        fun_name: String,
        param: String,
        param_type: Type,
        result_type: Type,
        latent: EffectExpr,
        body: Box<Expression>,
    },
    Unit,
    Zero,
    Succ(Box<Value>),
    True,
    False,
}

impl Value {
    /// Builds the numeral `Succⁿ(Zero)`.
    pub fn numeral(n: u64) -> Value {
        let mut v = Value::Zero;
        for _ in 0..n {
            v = Value::Succ(Box::new(v));
        }
        v
    }

    /// The natural this value denotes, when it is a closed numeral.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut v = self;
        let mut n = 0u64;
        loop {
            match v {
                Value::Zero => return Some(n),
                Value::Succ(inner) => {
                    n += 1;
                    v = inner;
                }
                _ => return None,
            }
        }
    }

    pub fn var(name: impl Into<String>) -> Value {
        Value::Var(name.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    /// Application of a function value to an argument value.
    App(Value, Value),
    /// A call of a declared algebraic operation.
    OpCall { op: String, args: Vec<Value> },
    Return(Value),
    /// `do x <- e1; e2`.
    Do {
        binder: String,
        first: Box<Expression>,
        rest: Box<Expression>,
    },
    /// Conditional over an already-evaluated boolean.
    If {
        cond: Value,
        then_branch: Box<Expression>,
        else_branch: Box<Expression>,
    },
    Prim { op: PrimOp, arg: Value },
    With {
        handler: Handler,
        body: Box<Expression>,
    },
}

impl Expression {
    pub fn ret(v: Value) -> Expression {
        Expression::Return(v)
    }

    pub fn do_bind(binder: impl Into<String>, first: Expression, rest: Expression) -> Expression {
        Expression::Do {
            binder: binder.into(),
            first: Box::new(first),
            rest: Box::new(rest),
        }
    }

    pub fn ite(cond: Value, then_branch: Expression, else_branch: Expression) -> Expression {
        Expression::If {
            cond,
            then_branch: Box::new(then_branch),
            else_branch: Box::new(else_branch),
        }
    }

    pub fn op_call(op: impl Into<String>, args: Vec<Value>) -> Expression {
        Expression::OpCall {
            op: op.into(),
            args,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Handler {
    pub clauses: Vec<Clause>,
    pub final_binder: String,
    pub final_expr: Box<Expression>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub op: String,
    pub params: Vec<String>,
    pub body: Expression,
    pub mode: ClauseMode,
}

impl Handler {
    pub fn clause_for(&self, op: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.op == op)
    }
}

/// The signature of a declared operation: `op : T₁ … Tn → T`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpSig {
    pub arg_types: Vec<Type>,
    pub return_type: Type,
}

pub type SignatureTable = BTreeMap<String, OpSig>;

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub signatures: SignatureTable,
    pub main: Expression,
}

// ---------------------------------------------------------------------------
// Pretty-printing.
//
// The printer undoes the parser's sugar where possible: numerals print as
// decimals, sequencing binders introduced by desugaring (whose names start
// with `$` and are never free in the continuation) print back as `e1; e2`,
// and functions with an unused `$`-named recursion binder print as `fun`.
// Expressions in a position the grammar bounds on the right (the bound
// expression of `do`, including desugared sequencing) are parenthesized
// unless they are simple, so printed programs reparse to the same tree.
// ---------------------------------------------------------------------------

/// Marks names invented during desugaring; they are not valid surface
/// identifiers, so they can never collide with user-written names.
pub fn is_desugar_name(name: &str) -> bool {
    name.starts_with('$')
}

fn value_needs_parens_in_app(v: &Value) -> bool {
    matches!(v, Value::RecFun { .. })
}

fn expr_is_simple(e: &Expression) -> bool {
    matches!(
        e,
        Expression::App(..) | Expression::OpCall { .. } | Expression::Return(..) | Expression::Prim { .. }
    )
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Var(x) => write!(f, "{x}"),
            Value::Unit => write!(f, "unit"),
            Value::True => write!(f, "true"),
            Value::False => write!(f, "false"),
            Value::Zero => write!(f, "0"),
            Value::Succ(inner) => match self.as_numeral() {
                Some(n) => write!(f, "{n}"),
                None => write!(f, "succ({inner})"),
            },
            Value::RecFun {
                fun_name,
                param,
                param_type,
                result_type,
                latent,
                body,
            } => {
                if is_desugar_name(fun_name) && !crate::core_lang::subst::free_vars_expr(body).contains(fun_name) {
                    write!(f, "fun ({param}: {param_type}): {result_type} ! {latent} -> {body}")
                } else {
                    write!(
                        f,
                        "rec {fun_name}({param}: {param_type}): {result_type} ! {latent} = {body}"
                    )
                }
            }
        }
    }
}

/// Prints a value as an application operand, parenthesizing function
/// literals.
struct AppOperand<'a>(&'a Value);

impl fmt::Display for AppOperand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if value_needs_parens_in_app(self.0) {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Prints an expression in a right-bounded position: `do`-bound expressions
/// and sequencing heads must not swallow the following `;`.
struct Bounded<'a>(&'a Expression);

impl fmt::Display for Bounded<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if expr_is_simple(self.0) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::App(v1, v2) => write!(f, "{} {}", AppOperand(v1), AppOperand(v2)),
            Expression::OpCall { op, args } => {
                write!(f, "{op}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Expression::Return(v) => write!(f, "return {}", AppOperand(v)),
            Expression::Do { binder, first, rest } => {
                if is_desugar_name(binder)
                    && !crate::core_lang::subst::free_vars_expr(rest).contains(binder)
                {
                    write!(f, "{}; {rest}", Bounded(first))
                } else {
                    write!(f, "do {binder} <- {}; {rest}", Bounded(first))
                }
            }
            Expression::If {
                cond,
                then_branch,
                else_branch,
            } => write!(
                f,
                "if {} then {then_branch} else {else_branch}",
                AppOperand(cond)
            ),
            Expression::Prim { op, arg } => write!(f, "{}({arg})", op.name()),
            Expression::With { handler, body } => {
                write!(f, "with {handler} handle {body}")
            }
        }
    }
}

impl fmt::Display for Handler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " {c}")?;
        }
        write!(
            f,
            "; finally {} -> {} }}",
            self.final_binder, self.final_expr
        )
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.op)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        let mode = match self.mode {
            ClauseMode::Continue => "=c",
            ClauseMode::Stop => "=s",
        };
        write!(f, ") {mode} -> {}", self.body)
    }
}

/// Free variables of values and expressions; see
/// [`crate::core_lang::subst`] for the binder conventions.
pub fn collect_ops(e: &Expression, out: &mut BTreeSet<String>) {
    match e {
        Expression::OpCall { op, .. } => {
            out.insert(op.clone());
        }
        Expression::App(v1, v2) => {
            collect_ops_value(v1, out);
            collect_ops_value(v2, out);
        }
        Expression::Return(v) | Expression::Prim { arg: v, .. } => collect_ops_value(v, out),
        Expression::Do { first, rest, .. } => {
            collect_ops(first, out);
            collect_ops(rest, out);
        }
        Expression::If {
            cond,
            then_branch,
            else_branch,
        } => {
            collect_ops_value(cond, out);
            collect_ops(then_branch, out);
            collect_ops(else_branch, out);
        }
        Expression::With { handler, body } => {
            for c in &handler.clauses {
                collect_ops(&c.body, out);
            }
            collect_ops(&handler.final_expr, out);
            collect_ops(body, out);
        }
    }
}

fn collect_ops_value(v: &Value, out: &mut BTreeSet<String>) {
    match v {
        Value::RecFun { body, .. } => collect_ops(body, out),
        Value::Succ(inner) => collect_ops_value(inner, out),
        _ => {}
    }
}
