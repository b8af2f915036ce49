//! Types of the surface language.

use std::fmt;

use crate::effect_algebra::EffectAutomaton;

/// A value type. `Bot` is an empty type, subtype of every type. Arrow types
/// carry a latent effect: the effect unleashed when the function is applied.
#[derive(Debug, Clone, PartialEq)]
pub enum Type {
    Nat,
    Bool,
    Unit,
    Bot,
    Arrow {
        param: Box<Type>,
        latent: EffectAutomaton,
        result: Box<Type>,
    },
}

impl Type {
    pub fn arrow(param: Type, latent: EffectAutomaton, result: Type) -> Type {
        Type::Arrow {
            param: Box::new(param),
            latent,
            result: Box::new(result),
        }
    }

    pub fn is_arrow(&self) -> bool {
        matches!(self, Type::Arrow { .. })
    }
}

/// Prints an effect automaton in effect-expression syntax when the expression
/// it was compiled from is known, and as an opaque summary otherwise (effects
/// produced by handler-filter application have no syntactic origin).
pub fn effect_display(eff: &EffectAutomaton) -> String {
    match &eff.origin {
        Some(e) => e.to_string(),
        None => {
            // Derived automata (handler outputs) have no originating
            // expression; show a bounded sample of the language instead.
            let (words, lassos) = eff.enumerate(3);
            let mut parts: Vec<String> = Vec::new();
            for w in words.iter().take(6) {
                if w.is_empty() {
                    parts.push("eps".into());
                } else {
                    parts.push(w.join(" . "));
                }
            }
            if words.len() > 6 {
                parts.push("...".into());
            }
            for l in lassos.iter().take(3) {
                let c = l.canonical();
                let period = format!("({})^w", c.period.join(" . "));
                if c.stem.is_empty() {
                    parts.push(period);
                } else {
                    parts.push(format!("{} . {period}", c.stem.join(" . ")));
                }
            }
            if lassos.len() > 3 {
                parts.push("...".into());
            }
            format!("{{ {} }}", parts.join(", "))
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Nat => write!(f, "Nat"),
            Type::Bool => write!(f, "Bool"),
            Type::Unit => write!(f, "Unit"),
            Type::Bot => write!(f, "Bot"),
            Type::Arrow {
                param,
                latent,
                result,
            } => {
                if param.is_arrow() {
                    write!(f, "({param})")?;
                } else {
                    write!(f, "{param}")?;
                }
                write!(f, " -[{}]-> {result}", effect_display(latent))
            }
        }
    }
}
