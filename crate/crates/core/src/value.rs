//! Runtime values of the denotation calculus.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::model::{Entity, Model};
use crate::term::TermRef;
use crate::types::EffectId;

pub type Env = BTreeMap<String, Value>;

/// A function body. Closures capture only their free variables so that
/// structural comparison is not disturbed by unrelated bindings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Closure { param: String, body: TermRef, env: Arc<Env> },
    /// A finite function given by its graph; used for generated test inputs
    /// and for enumerating function domains.
    Table(Arc<BTreeMap<Value, Value>>),
    Native(Arc<Native>),
}

/// Closures built by the effect operations themselves.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Native {
    Id,
    /// `λx. f (g x)`
    Compose(Value, Value),
    /// `λf. f a`
    ApplyTo(Value),
    /// `λf. fmap_F f x`
    FmapOver(EffectId, Value),
    /// `λa. fmap_R (λf. f a) φ`
    Upsilon(EffectId, Value),
    /// `λg. ⟨v, g⟩`, the unit of the product/reader adjunction.
    PairWith(Value),
    ReaderFmap { f: Value, x: Value },
    ReaderEta(Value),
    ReaderMu(Value),
    StateFmap { f: Value, m: Value },
    StateEta(Value),
    StateMu(Value),
    ContFmap { f: Value, x: Value },
    /// `λa. c (f a)`
    ContFmapK { c: Value, f: Value },
    ContEta(Value),
    ContMu(Value),
    /// `λm. m c`
    ContMuK(Value),
    /// `λc. ∃x ∈ m. c x`
    SetToCont(Value),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    B(bool),
    E(Entity),
    /// Assignments and discourse states: finite sequences of entities.
    Seq(Vec<Entity>),
    Fn(Func),
    SetV(Arc<BTreeSet<Value>>),
    /// `None` is the failure marker `#`.
    MaybeV(Option<Box<Value>>),
    PairV(Box<Value>, Box<Value>),
    ReaderV(Func),
    StateV(Func),
    ContV(Func),
}

impl Value {
    pub fn set(items: impl IntoIterator<Item = Value>) -> Value {
        Value::SetV(Arc::new(items.into_iter().collect()))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::PairV(Box::new(a), Box::new(b))
    }

    pub fn some(v: Value) -> Value {
        Value::MaybeV(Some(Box::new(v)))
    }

    pub fn none() -> Value {
        Value::MaybeV(None)
    }

    pub fn native(n: Native) -> Func {
        Func::Native(Arc::new(n))
    }

    pub fn table(graph: impl IntoIterator<Item = (Value, Value)>) -> Value {
        Value::Fn(Func::Table(Arc::new(graph.into_iter().collect())))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::B(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_entity(&self) -> Option<Entity> {
        match self {
            Value::E(e) => Some(*e),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&BTreeSet<Value>> {
        match self {
            Value::SetV(s) => Some(s),
            _ => None,
        }
    }

    /// The underlying function of any function-like value.
    pub fn as_func(&self) -> Option<&Func> {
        match self {
            Value::Fn(f) | Value::ReaderV(f) | Value::StateV(f) | Value::ContV(f) => Some(f),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Value::B(_) => "truth value",
            Value::E(_) => "entity",
            Value::Seq(_) => "sequence",
            Value::Fn(_) => "function",
            Value::SetV(_) => "set",
            Value::MaybeV(_) => "maybe",
            Value::PairV(..) => "pair",
            Value::ReaderV(_) => "reader",
            Value::StateV(_) => "state",
            Value::ContV(_) => "continuation",
        }
    }

    /// Display with entity names resolved against `model`.
    pub fn show<'a>(&'a self, model: &'a Model) -> ShowValue<'a> {
        ShowValue { value: self, model }
    }
}

pub struct ShowValue<'a> {
    value: &'a Value,
    model: &'a Model,
}

impl fmt::Display for ShowValue<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.model;
        match self.value {
            Value::B(true) => f.write_str("⊤"),
            Value::B(false) => f.write_str("⊥"),
            Value::E(e) => f.write_str(m.name(*e)),
            Value::Seq(s) => {
                let names: Vec<_> = s.iter().map(|e| m.name(*e)).collect();
                write!(f, "[{}]", names.join(", "))
            }
            Value::SetV(s) => {
                f.write_str("{")?;
                for (i, v) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", v.show(m))?;
                }
                f.write_str("}")
            }
            Value::MaybeV(None) => f.write_str("#"),
            Value::MaybeV(Some(v)) => write!(f, "{}", v.show(m)),
            Value::PairV(a, b) => write!(f, "⟨{}, {}⟩", a.show(m), b.show(m)),
            Value::Fn(_) => f.write_str("<fn>"),
            Value::ReaderV(_) => f.write_str("<reader>"),
            Value::StateV(_) => f.write_str("<state>"),
            Value::ContV(_) => f.write_str("<cont>"),
        }
    }
}
