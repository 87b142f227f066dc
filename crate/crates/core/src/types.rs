//! Types of the calculus and the effect-functor registry.
//!
//! A type is a pure core built from base types, arrows and products, wrapped
//! in any number of effect applications. The registry records which effect
//! functors exist, what structure they carry (applicative, monad, ...), which
//! pairs form adjunctions, and the natural transformations between them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::sexpr::Sexp;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EffectId(pub String);

impl EffectId {
    pub fn new(name: impl Into<String>) -> Self {
        EffectId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EffectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EffectId {
    fn from(s: &str) -> Self {
        EffectId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ty {
    Base(String),
    Arrow(Box<Ty>, Box<Ty>),
    Prod(Box<Ty>, Box<Ty>),
    Eff(EffectId, Box<Ty>),
}

impl Ty {
    pub fn base(name: &str) -> Ty {
        Ty::Base(name.to_string())
    }

    pub fn e() -> Ty {
        Ty::base("e")
    }

    pub fn t() -> Ty {
        Ty::base("t")
    }

    pub fn arrow(dom: Ty, cod: Ty) -> Ty {
        Ty::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn prod(l: Ty, r: Ty) -> Ty {
        Ty::Prod(Box::new(l), Box::new(r))
    }

    /// Unchecked effect application; see [`Registry::apply_functor`] for the
    /// checked version.
    pub fn eff(f: impl Into<EffectId>, inner: Ty) -> Ty {
        Ty::Eff(f.into(), Box::new(inner))
    }

    /// Outermost effects, outermost first, and the remaining core.
    pub fn effect_stack(&self) -> (Vec<EffectId>, &Ty) {
        let mut effects = Vec::new();
        let mut cur = self;
        while let Ty::Eff(f, inner) = cur {
            effects.push(f.clone());
            cur = inner;
        }
        (effects, cur)
    }

    pub fn refold(effects: &[EffectId], core: Ty) -> Ty {
        effects.iter().rev().fold(core, |acc, f| Ty::Eff(f.clone(), Box::new(acc)))
    }

    /// No effect constructor anywhere in the type.
    pub fn is_pure(&self) -> bool {
        match self {
            Ty::Base(_) => true,
            Ty::Arrow(a, b) | Ty::Prod(a, b) => a.is_pure() && b.is_pure(),
            Ty::Eff(..) => false,
        }
    }

    /// Number of effect constructors at any depth.
    pub fn effect_count(&self) -> usize {
        match self {
            Ty::Base(_) => 0,
            Ty::Arrow(a, b) | Ty::Prod(a, b) => a.effect_count() + b.effect_count(),
            Ty::Eff(_, inner) => 1 + inner.effect_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Ty::Base(_) => 0,
            Ty::Arrow(a, b) | Ty::Prod(a, b) => 1 + a.depth().max(b.depth()),
            Ty::Eff(_, inner) => 1 + inner.depth(),
        }
    }

    pub fn to_sexpr(&self) -> String {
        match self {
            Ty::Base(b) if b == "⊥" => "bot".to_string(),
            Ty::Base(b) => b.clone(),
            Ty::Arrow(a, b) => format!("(-> {} {})", a.to_sexpr(), b.to_sexpr()),
            Ty::Prod(a, b) => format!("(* {} {})", a.to_sexpr(), b.to_sexpr()),
            Ty::Eff(f, inner) => format!("({} {})", f, inner.to_sexpr()),
        }
    }

    /// Read a type expression: `e | t | g | s | bot | (-> T T) | (* T T) | (F T)`.
    /// Names are not checked against a registry here.
    pub fn from_sexp(s: &Sexp) -> Result<Ty> {
        match s {
            Sexp::Atom(name, _) => Ok(Ty::Base(if name == "bot" { "⊥".into() } else { name.clone() })),
            Sexp::Str(..) => Err(Error::parse(s.line(), format!("expected a type, found {s}"))),
            Sexp::List(items, line) => match items.as_slice() {
                [Sexp::Atom(op, _), a, b] if op == "->" => {
                    Ok(Ty::arrow(Ty::from_sexp(a)?, Ty::from_sexp(b)?))
                }
                [Sexp::Atom(op, _), a, b] if op == "*" => {
                    Ok(Ty::prod(Ty::from_sexp(a)?, Ty::from_sexp(b)?))
                }
                [Sexp::Atom(f, _), inner] if f != "->" && f != "*" => Ok(Ty::eff(f.as_str(), Ty::from_sexp(inner)?)),
                _ => Err(Error::parse(*line, format!("malformed type expression {s}"))),
            },
        }
    }

    pub fn parse(src: &str) -> Result<Ty> {
        let forms = crate::sexpr::parse_all(src)?;
        match forms.as_slice() {
            [one] => Ty::from_sexp(one),
            _ => Err(Error::parse(1, format!("expected exactly one type in {src:?}"))),
        }
    }

    fn fmt_atomic(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Base(_) | Ty::Eff(..) => write!(f, "{self}"),
            _ => write!(f, "({self})"),
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Base(b) => f.write_str(b),
            Ty::Arrow(a, b) => {
                if matches!(**a, Ty::Arrow(..)) {
                    write!(f, "({a}) -> {b}")
                } else {
                    write!(f, "{a} -> {b}")
                }
            }
            Ty::Prod(a, b) => {
                a.fmt_atomic(f)?;
                f.write_str(" * ")?;
                b.fmt_atomic(f)
            }
            Ty::Eff(name, inner) => {
                write!(f, "{name} ")?;
                inner.fmt_atomic(f)
            }
        }
    }
}

/// Runtime representation backing an effect functor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Carrier {
    /// `τ + ⊥`, failure marked by `#`.
    Maybe,
    /// Finite sets.
    Set,
    /// `s → {τ × s}`.
    State,
    /// `g → τ`.
    Reader,
    /// `τ × t`, accumulating truth conditions conjunctively.
    Writer,
    /// `(τ → t) → t`.
    Cont,
    /// `τ × g`, the left adjoint of `Reader`.
    Product,
}

impl Carrier {
    pub fn from_name(name: &str) -> Option<Carrier> {
        Some(match name {
            "maybe" => Carrier::Maybe,
            "set" => Carrier::Set,
            "state" => Carrier::State,
            "reader" => Carrier::Reader,
            "writer" => Carrier::Writer,
            "cont" => Carrier::Cont,
            "product" => Carrier::Product,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Carrier::Maybe => "maybe",
            Carrier::Set => "set",
            Carrier::State => "state",
            Carrier::Reader => "reader",
            Carrier::Writer => "writer",
            Carrier::Cont => "cont",
            Carrier::Product => "product",
        }
    }

    /// Whether the carrier has a unit/join pair.
    pub fn supports_monad(self) -> bool {
        !matches!(self, Carrier::Product)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Capabilities {
    pub functor: bool,
    pub applicative: bool,
    pub monad: bool,
    pub comonad: bool,
}

impl Capabilities {
    /// Close under the implications monad ⇒ applicative ⇒ functor and
    /// comonad ⇒ functor.
    pub fn closed(mut self) -> Self {
        if self.monad {
            self.applicative = true;
        }
        if self.applicative || self.comonad {
            self.functor = true;
        }
        self
    }

    pub fn monad() -> Self {
        Capabilities { functor: true, applicative: true, monad: true, comonad: false }
    }

    pub fn functor_only() -> Self {
        Capabilities { functor: true, ..Default::default() }
    }
}

/// The set of types a functor may be applied to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub enum Applicability {
    #[default]
    All,
    Pattern(TyPattern),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TyPattern {
    Any,
    Base(String),
    Arrow(Box<TyPattern>, Box<TyPattern>),
    Prod(Box<TyPattern>, Box<TyPattern>),
    Eff(EffectId, Box<TyPattern>),
}

impl TyPattern {
    pub fn from_sexp(s: &Sexp) -> Result<TyPattern> {
        match s {
            Sexp::Atom(a, _) if a == "_" => Ok(TyPattern::Any),
            Sexp::List(items, _) if items.len() == 3 && items[0].as_atom() == Some("->") => {
                Ok(TyPattern::Arrow(
                    Box::new(TyPattern::from_sexp(&items[1])?),
                    Box::new(TyPattern::from_sexp(&items[2])?),
                ))
            }
            Sexp::List(items, _) if items.len() == 3 && items[0].as_atom() == Some("*") => {
                Ok(TyPattern::Prod(
                    Box::new(TyPattern::from_sexp(&items[1])?),
                    Box::new(TyPattern::from_sexp(&items[2])?),
                ))
            }
            Sexp::List(items, _) if items.len() == 2 => Ok(TyPattern::Eff(
                EffectId::new(items[0].expect_atom("functor name")?),
                Box::new(TyPattern::from_sexp(&items[1])?),
            )),
            Sexp::Atom(a, _) => Ok(TyPattern::Base(if a == "bot" { "⊥".into() } else { a.clone() })),
            _ => Err(Error::parse(s.line(), format!("malformed type pattern {s}"))),
        }
    }

    pub fn to_sexpr(&self) -> String {
        match self {
            TyPattern::Any => "_".to_string(),
            TyPattern::Base(b) if b == "⊥" => "bot".to_string(),
            TyPattern::Base(b) => b.clone(),
            TyPattern::Arrow(a, b) => format!("(-> {} {})", a.to_sexpr(), b.to_sexpr()),
            TyPattern::Prod(a, b) => format!("(* {} {})", a.to_sexpr(), b.to_sexpr()),
            TyPattern::Eff(f, a) => format!("({f} {})", a.to_sexpr()),
        }
    }

    pub fn matches(&self, ty: &Ty) -> bool {
        match (self, ty) {
            (TyPattern::Any, _) => true,
            (TyPattern::Base(a), Ty::Base(b)) => a == b,
            (TyPattern::Arrow(p, q), Ty::Arrow(a, b)) | (TyPattern::Prod(p, q), Ty::Prod(a, b)) => {
                p.matches(a) && q.matches(b)
            }
            (TyPattern::Eff(f, p), Ty::Eff(g, inner)) => f == g && p.matches(inner),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctorDef {
    pub id: EffectId,
    pub caps: Capabilities,
    /// Only meaningful together with `caps.monad`.
    pub commutative: bool,
    /// Set when this functor is the left adjoint `L` in `L ⊣ R`.
    pub adjoint_right: Option<EffectId>,
    /// Set when this functor is the right adjoint `R` in `L ⊣ R`.
    pub adjoint_left: Option<EffectId>,
    pub applicability: Applicability,
    pub external: bool,
    pub carrier: Carrier,
}

impl FunctorDef {
    pub fn new(id: &str, carrier: Carrier, caps: Capabilities) -> Self {
        FunctorDef {
            id: EffectId::new(id),
            caps: caps.closed(),
            commutative: false,
            adjoint_right: None,
            adjoint_left: None,
            applicability: Applicability::All,
            external: false,
            carrier,
        }
    }

    pub fn applies_to(&self, ty: &Ty) -> bool {
        match &self.applicability {
            Applicability::All => true,
            Applicability::Pattern(p) => p.matches(ty),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NatDef {
    pub name: String,
    pub source: Vec<EffectId>,
    pub target: Vec<EffectId>,
    pub is_handler: bool,
    /// Name of the built-in component implementing the transformation.
    pub component: String,
    /// Fallback value for handlers that need one (`maybe-default`).
    pub default: Option<Term>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Registry {
    pub base_types: BTreeSet<String>,
    pub functors: BTreeMap<EffectId, FunctorDef>,
    /// `(L, R)` pairs with `L ⊣ R`, in declaration order.
    pub adjunctions: Vec<(EffectId, EffectId)>,
    pub nats: Vec<NatDef>,
}

impl Registry {
    /// A registry with the default base types `e t g s ⊥` and no functors.
    pub fn with_default_bases() -> Self {
        let mut r = Registry::default();
        for b in ["e", "t", "g", "s", "⊥"] {
            r.base_types.insert(b.to_string());
        }
        r
    }

    pub fn functor(&self, id: &EffectId) -> Result<&FunctorDef> {
        self.functors.get(id).ok_or_else(|| Error::UnknownEffect(id.to_string()))
    }

    pub fn add_functor(&mut self, def: FunctorDef) -> Result<()> {
        if self.functors.contains_key(&def.id) {
            return Err(Error::Registry(format!("functor {} declared twice", def.id)));
        }
        self.functors.insert(def.id.clone(), def);
        Ok(())
    }

    /// Record `left ⊣ right`; both functors must already be registered.
    pub fn add_adjunction(&mut self, left: &EffectId, right: &EffectId) -> Result<()> {
        self.functor(left)?;
        self.functor(right)?;
        if self.adjunctions.iter().any(|(l, r)| l == left && r == right) {
            return Err(Error::Registry(format!("adjunction {left} ⊣ {right} declared twice")));
        }
        self.functors.get_mut(left).unwrap().adjoint_right = Some(right.clone());
        self.functors.get_mut(right).unwrap().adjoint_left = Some(left.clone());
        self.adjunctions.push((left.clone(), right.clone()));
        Ok(())
    }

    pub fn is_adjunction(&self, left: &EffectId, right: &EffectId) -> bool {
        self.adjunctions.iter().any(|(l, r)| l == left && r == right)
    }

    pub fn nat(&self, name: &str) -> Option<&NatDef> {
        self.nats.iter().find(|n| n.name == name)
    }

    /// Handlers whose source is exactly `[f]`, in declaration order.
    pub fn handlers_for<'a>(&'a self, f: &'a EffectId) -> impl Iterator<Item = &'a NatDef> + 'a {
        self.nats
            .iter()
            .filter(move |n| n.is_handler && n.source.len() == 1 && &n.source[0] == f)
    }

    /// Every base name is declared, every functor registered, and every
    /// effect application admissible.
    pub fn check_well_formed(&self, ty: &Ty) -> Result<()> {
        match ty {
            Ty::Base(b) if self.base_types.contains(b) => Ok(()),
            Ty::Base(b) => Err(Error::MalformedType(format!("undeclared base type {b}"))),
            Ty::Arrow(a, b) | Ty::Prod(a, b) => {
                self.check_well_formed(a)?;
                self.check_well_formed(b)
            }
            Ty::Eff(f, inner) => {
                self.check_well_formed(inner)?;
                let def = self.functor(f)?;
                if def.applies_to(inner) {
                    Ok(())
                } else {
                    Err(Error::InapplicableFunctor { functor: f.to_string(), ty: inner.to_string() })
                }
            }
        }
    }

    pub fn is_pure(&self, ty: &Ty) -> Result<bool> {
        self.check_well_formed(ty)?;
        Ok(ty.is_pure())
    }

    pub fn effect_stack(&self, ty: &Ty) -> Result<(Vec<EffectId>, Ty)> {
        self.check_well_formed(ty)?;
        let (effects, core) = ty.effect_stack();
        Ok((effects, core.clone()))
    }

    /// `Eff(f, ty)`, provided `f` is registered and admits `ty`.
    pub fn apply_functor(&self, f: &EffectId, ty: Ty) -> Result<Ty> {
        let def = self.functor(f)?;
        if !def.applies_to(&ty) {
            return Err(Error::InapplicableFunctor { functor: f.to_string(), ty: ty.to_string() });
        }
        Ok(Ty::Eff(f.clone(), Box::new(ty)))
    }

    /// `sub ⪯ sup`: `sub` is `sup` under a (possibly empty) prefix of
    /// registered effect applications at the outermost position.
    pub fn subtype_leq(&self, sub: &Ty, sup: &Ty) -> bool {
        let (sub_fx, sub_core) = sub.effect_stack();
        let (sup_fx, sup_core) = sup.effect_stack();
        if sub_core != sup_core || sub_fx.len() < sup_fx.len() {
            return false;
        }
        let k = sub_fx.len() - sup_fx.len();
        sub_fx[k..] == sup_fx[..] && sub_fx[..k].iter().all(|f| self.functors.contains_key(f))
    }
}
