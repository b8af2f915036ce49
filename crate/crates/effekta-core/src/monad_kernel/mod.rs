//! The pluggable monad abstraction: four monadic runtimes sharing one
//! element representation, with unit/bind/map, the operation semantics
//! `mrun`, a least element, and the approximation order used by the
//! approximant chain.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::core_lang::ast::{OpSig, Value};

/// Which monad a run is instantiated with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonadTag {
    Exception { exc_names: BTreeSet<String> },
    NondetList,
    Distribution,
    PointedOutput { locations: BTreeSet<String> },
}

/// A payload of the exception monad: an exception, a value, or the least
/// element. `Bottom` appears only in the result universe used by the
/// approximant machinery; ordinary reduction never produces it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExcVal<P> {
    Exc(String),
    Val(P),
    Bottom,
}

/// An element of one of the four monads over payload type `P`.
///
/// - `Exception`: `Exc + P` (plus `Bottom` in result position);
/// - `List`: finite ordered lists, duplicates allowed;
/// - `Dist`: finitely supported subdistributions with exact rational
///   weights, total mass ≤ 1, no zero-weight entries;
/// - `Output`: a finite word of (location, natural) writes paired with a
///   payload or the least element (`None`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum MonadicElement<P> {
    Exception(ExcVal<P>),
    List(Vec<P>),
    Dist(BTreeMap<P, BigRational>),
    Output {
        word: Vec<(String, u64)>,
        payload: Option<P>,
    },
}

impl<P: Ord + Clone> MonadicElement<P> {
    /// All payloads carried by the element, in presentation order.
    pub fn payloads(&self) -> Vec<&P> {
        match self {
            MonadicElement::Exception(ExcVal::Val(p)) => vec![p],
            MonadicElement::Exception(_) => vec![],
            MonadicElement::List(l) => l.iter().collect(),
            MonadicElement::Dist(d) => d.keys().collect(),
            MonadicElement::Output { payload, .. } => payload.iter().collect(),
        }
    }

    /// True iff every payload satisfies `pred` (exceptions, empty lists and
    /// the least element carry no payloads and pass vacuously). This is how
    /// "the element lies in the image of the result embedding" is checked.
    pub fn all_payloads<F: Fn(&P) -> bool>(&self, pred: F) -> bool {
        self.payloads().into_iter().all(pred)
    }
}

impl<P: std::fmt::Display> std::fmt::Display for MonadicElement<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MonadicElement::Exception(ExcVal::Exc(e)) => write!(f, "exception {e}"),
            MonadicElement::Exception(ExcVal::Val(p)) => write!(f, "{p}"),
            MonadicElement::Exception(ExcVal::Bottom) => write!(f, "_|_"),
            MonadicElement::List(l) => {
                write!(f, "[")?;
                for (i, p) in l.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "]")
            }
            MonadicElement::Dist(d) => {
                write!(f, "{{")?;
                for (i, (p, w)) in d.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{w}: {p}")?;
                }
                write!(f, "}}")
            }
            MonadicElement::Output { word, payload } => {
                write!(f, "<")?;
                if word.is_empty() {
                    write!(f, "eps")?;
                } else {
                    for (loc, n) in word {
                        write!(f, "({loc},{n})")?;
                    }
                }
                match payload {
                    Some(p) => write!(f, ", {p}>"),
                    None => write!(f, ", _|_>"),
                }
            }
        }
    }
}

/// Per-instance unit: embeds a payload as a pure monadic element.
pub fn unit<P: Ord + Clone>(tag: &MonadTag, x: P) -> MonadicElement<P> {
    match tag {
        MonadTag::Exception { .. } => MonadicElement::Exception(ExcVal::Val(x)),
        MonadTag::NondetList => MonadicElement::List(vec![x]),
        MonadTag::Distribution => MonadicElement::Dist(BTreeMap::from([(x, BigRational::one())])),
        MonadTag::PointedOutput { .. } => MonadicElement::Output {
            word: vec![],
            payload: Some(x),
        },
    }
}

/// Kleisli extension. Exceptions and the least element propagate; lists
/// concatenate in order; distributions sum weighted pushforwards with exact
/// arithmetic; output prepends the already-written word, with the least
/// element absorbing.
pub fn bind<A: Ord + Clone, B: Ord + Clone>(
    m: &MonadicElement<A>,
    f: impl Fn(&A) -> MonadicElement<B>,
) -> MonadicElement<B> {
    match m {
        MonadicElement::Exception(ExcVal::Exc(e)) => {
            MonadicElement::Exception(ExcVal::Exc(e.clone()))
        }
        MonadicElement::Exception(ExcVal::Bottom) => MonadicElement::Exception(ExcVal::Bottom),
        MonadicElement::Exception(ExcVal::Val(x)) => match f(x) {
            MonadicElement::Exception(v) => MonadicElement::Exception(v),
            _ => panic!("bind: callback changed monad instance"),
        },
        MonadicElement::List(l) => {
            let mut out = Vec::new();
            for x in l {
                match f(x) {
                    MonadicElement::List(mut l2) => out.append(&mut l2),
                    _ => panic!("bind: callback changed monad instance"),
                }
            }
            MonadicElement::List(out)
        }
        MonadicElement::Dist(d) => {
            let mut out: BTreeMap<B, BigRational> = BTreeMap::new();
            for (x, w) in d {
                match f(x) {
                    MonadicElement::Dist(d2) => {
                        for (y, w2) in d2 {
                            let entry = out.entry(y).or_insert_with(BigRational::zero);
                            *entry += w * &w2;
                        }
                    }
                    _ => panic!("bind: callback changed monad instance"),
                }
            }
            out.retain(|_, w| !w.is_zero());
            MonadicElement::Dist(out)
        }
        MonadicElement::Output { word, payload } => match payload {
            None => MonadicElement::Output {
                word: word.clone(),
                payload: None,
            },
            Some(x) => match f(x) {
                MonadicElement::Output {
                    word: w2,
                    payload: p2,
                } => {
                    let mut w = word.clone();
                    w.extend(w2);
                    MonadicElement::Output {
                        word: w,
                        payload: p2,
                    }
                }
                _ => panic!("bind: callback changed monad instance"),
            },
        },
    }
}

/// Functorial action, implemented directly; equal to `bind(m, unit ∘ g)`.
pub fn fmap<A: Ord + Clone, B: Ord + Clone>(
    g: impl Fn(&A) -> B,
    m: &MonadicElement<A>,
) -> MonadicElement<B> {
    match m {
        MonadicElement::Exception(ExcVal::Exc(e)) => {
            MonadicElement::Exception(ExcVal::Exc(e.clone()))
        }
        MonadicElement::Exception(ExcVal::Bottom) => MonadicElement::Exception(ExcVal::Bottom),
        MonadicElement::Exception(ExcVal::Val(x)) => MonadicElement::Exception(ExcVal::Val(g(x))),
        MonadicElement::List(l) => MonadicElement::List(l.iter().map(g).collect()),
        MonadicElement::Dist(d) => {
            let mut out: BTreeMap<B, BigRational> = BTreeMap::new();
            for (x, w) in d {
                *out.entry(g(x)).or_insert_with(BigRational::zero) += w;
            }
            MonadicElement::Dist(out)
        }
        MonadicElement::Output { word, payload } => MonadicElement::Output {
            word: word.clone(),
            payload: payload.as_ref().map(g),
        },
    }
}

/// The least element of the approximation order.
pub fn bottom<P: Ord + Clone>(tag: &MonadTag) -> MonadicElement<P> {
    match tag {
        MonadTag::Exception { .. } => MonadicElement::Exception(ExcVal::Bottom),
        MonadTag::NondetList => MonadicElement::List(vec![]),
        MonadTag::Distribution => MonadicElement::Dist(BTreeMap::new()),
        MonadTag::PointedOutput { .. } => MonadicElement::Output {
            word: vec![],
            payload: None,
        },
    }
}

/// The approximation order: flat over `Bottom` for exceptions, list prefix,
/// pointwise weight comparison for subdistributions, and word-prefix with an
/// undetermined payload (or full equality) for output.
pub fn order_leq<P: Ord + Clone>(m1: &MonadicElement<P>, m2: &MonadicElement<P>) -> bool {
    match (m1, m2) {
        (MonadicElement::Exception(ExcVal::Bottom), MonadicElement::Exception(_)) => true,
        (MonadicElement::Exception(a), MonadicElement::Exception(b)) => a == b,
        (MonadicElement::List(a), MonadicElement::List(b)) => {
            a.len() <= b.len() && a[..] == b[..a.len()]
        }
        (MonadicElement::Dist(a), MonadicElement::Dist(b)) => a
            .iter()
            .all(|(x, w)| b.get(x).is_some_and(|w2| w <= w2)),
        (
            MonadicElement::Output {
                word: w1,
                payload: p1,
            },
            MonadicElement::Output {
                word: w2,
                payload: p2,
            },
        ) => {
            let prefix = w1.len() <= w2.len() && w1[..] == w2[..w1.len()];
            (prefix && p1.is_none()) || (w1 == w2 && p1 == p2)
        }
        _ => false,
    }
}

/// Total probability mass of a distribution element.
pub fn dist_mass<P: Ord + Clone>(m: &MonadicElement<P>) -> BigRational {
    match m {
        MonadicElement::Dist(d) => d
            .values()
            .fold(BigRational::zero(), |acc, w| acc + w),
        _ => panic!("dist_mass on a non-distribution element"),
    }
}

/// How an operation is carried out by the monad.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpKind {
    /// Raise the named exception; never returns.
    Raise(String),
    /// Branch on a boolean: both outcomes under the list monad, a fair coin
    /// under the distribution monad.
    Choose,
    /// Write a natural to the named location.
    Write(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperationImpl {
    pub op: String,
    pub kind: OpKind,
    pub sig: OpSig,
}

impl OpKind {
    /// Whether this operation can be carried out by the given monad.
    pub fn compatible(&self, tag: &MonadTag) -> bool {
        match self {
            OpKind::Raise(name) => {
                matches!(tag, MonadTag::Exception { exc_names } if exc_names.contains(name))
            }
            OpKind::Choose => matches!(tag, MonadTag::NondetList | MonadTag::Distribution),
            OpKind::Write(loc) => {
                matches!(tag, MonadTag::PointedOutput { locations } if locations.contains(loc))
            }
        }
    }
}

/// The partial operation semantics: the monadic element an operation call
/// produces, or `None` where the partial function is undefined (a write of a
/// non-numeral). Undefinedness is what makes a configuration go wrong.
pub fn mrun(imp: &OperationImpl, tag: &MonadTag, args: &[Value]) -> Option<MonadicElement<Value>> {
    if args.len() != imp.sig.arg_types.len() {
        return None;
    }
    match (&imp.kind, tag) {
        (OpKind::Raise(name), MonadTag::Exception { .. }) => {
            Some(MonadicElement::Exception(ExcVal::Exc(name.clone())))
        }
        (OpKind::Choose, MonadTag::NondetList) => {
            Some(MonadicElement::List(vec![Value::True, Value::False]))
        }
        (OpKind::Choose, MonadTag::Distribution) => {
            let half = BigRational::new(BigInt::from(1), BigInt::from(2));
            Some(MonadicElement::Dist(BTreeMap::from([
                (Value::True, half.clone()),
                (Value::False, half),
            ])))
        }
        (OpKind::Write(loc), MonadTag::PointedOutput { .. }) => {
            let n = args[0].as_numeral()?;
            Some(MonadicElement::Output {
                word: vec![(loc.clone(), n)],
                payload: Some(Value::Unit),
            })
        }
        _ => None,
    }
}

// `Value` lacks a derived order (it contains types and effect automata); give
// the kernel the order it needs by pretty-printed key. Payloads compared this
// way are always closed values, whose printing is injective.
impl Ord for Value {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.to_string().cmp(&other.to_string())
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Eq for Value {}

// Expressions occur as payloads of one-step reduction results; same
// print-based order. Expressions that print alike differ at most in the
// names of unused desugaring binders and thus behave alike.
impl Ord for crate::core_lang::ast::Expression {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.to_string().cmp(&other.to_string())
    }
}

impl PartialOrd for crate::core_lang::ast::Expression {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Eq for crate::core_lang::ast::Expression {}
