//! The lambda-term IR for lexical denotations and combinator denotations.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sexpr::{keyword_args, Sexp};
use crate::types::{Carrier, EffectId};

pub type TermRef = Arc<Term>;

/// Effect-structure operations resolved against the registry at evaluation
/// time.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EffOp {
    /// `fmap_F f x`
    Fmap(EffectId),
    /// `η_F x`
    Eta(EffectId),
    /// `μ_F x`
    Mu(EffectId),
    /// `f <*>_F x`
    Ap(EffectId),
    /// `ε_{L,R} x`
    Eps(EffectId, EffectId),
    /// `Υ_R f`
    Upsilon(EffectId),
    /// `⇓ x`
    Lower,
    /// A registered handler, by name.
    Handler(String),
    /// A registered natural transformation, by name.
    Nat(String),
}

impl EffOp {
    pub fn arity(&self) -> usize {
        match self {
            EffOp::Fmap(_) | EffOp::Ap(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Lam(String, TermRef),
    App(TermRef, TermRef),
    Pair(TermRef, TermRef),
    Fst(TermRef),
    Snd(TermRef),
    Pred(String, Vec<Term>),
    Const(String),
    Bool(bool),
    Forall(String, TermRef),
    Exists(String, TermRef),
    Not(TermRef),
    And(TermRef, TermRef),
    Or(TermRef, TermRef),
    Eq(TermRef, TermRef),
    If(TermRef, TermRef, TermRef),
    /// `{ yield | var ∈ entities, guard }`
    SetBuilder { var: String, guard: TermRef, yield_: TermRef },
    EffOp(EffOp, Vec<Term>),
    /// `x` if the set is the singleton `{x}`, `#` otherwise.
    Iota(TermRef),
    Some(TermRef),
    None,
    /// Element `k` of an assignment or state sequence.
    Nth(TermRef, usize),
    /// Prepend an entity to a sequence.
    Cons(TermRef, TermRef),
    /// A closure tagged with the carrier it inhabits (`reader`, `state`,
    /// `cont`).
    Wrap(Carrier, String, TermRef),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }

    pub fn lam(x: &str, body: Term) -> Term {
        Term::Lam(x.to_string(), Arc::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    pub fn app2(f: Term, a: Term, b: Term) -> Term {
        Term::app(Term::app(f, a), b)
    }

    pub fn op(op: EffOp, args: Vec<Term>) -> Term {
        Term::EffOp(op, args)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let under = |x: &str, body: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>| {
            bound.push(x.to_string());
            body.collect_free(bound, out);
            bound.pop();
        };
        match self {
            Term::Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    out.insert(x.clone());
                }
            }
            Term::Lam(x, b) | Term::Forall(x, b) | Term::Exists(x, b) | Term::Wrap(_, x, b) => {
                under(x, b, bound, out)
            }
            Term::SetBuilder { var, guard, yield_ } => {
                under(var, guard, bound, out);
                under(var, yield_, bound, out);
            }
            Term::App(a, b)
            | Term::Pair(a, b)
            | Term::And(a, b)
            | Term::Or(a, b)
            | Term::Eq(a, b)
            | Term::Cons(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Term::If(a, b, c) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
                c.collect_free(bound, out);
            }
            Term::Fst(a) | Term::Snd(a) | Term::Not(a) | Term::Iota(a) | Term::Some(a) | Term::Nth(a, _) => {
                a.collect_free(bound, out)
            }
            Term::Pred(_, args) | Term::EffOp(_, args) => {
                for a in args {
                    a.collect_free(bound, out);
                }
            }
            Term::Const(_) | Term::Bool(_) | Term::None => {}
        }
    }

    pub fn from_sexp(s: &Sexp) -> Result<Term> {
        let line = s.line();
        let bad = |msg: String| Error::parse(line, msg);
        let items = match s {
            Sexp::Atom(a, _) => {
                return Ok(match a.as_str() {
                    "true" | "⊤" => Term::Bool(true),
                    "false" | "⊥" => Term::Bool(false),
                    _ => Term::Var(a.clone()),
                })
            }
            Sexp::Str(..) => return Err(bad(format!("unexpected string {s} in term"))),
            Sexp::List(items, _) => items,
        };
        let head = items
            .first()
            .and_then(Sexp::as_atom)
            .ok_or_else(|| bad(format!("term form must start with a symbol: {s}")))?;
        let args = &items[1..];
        let sub = |i: usize| -> Result<TermRef> { Ok(Arc::new(Term::from_sexp(&args[i])?)) };
        let name = |i: usize| -> Result<String> { Ok(args[i].expect_atom("a name")?.to_string()) };
        let effect = |i: usize| -> Result<EffectId> { Ok(EffectId::new(args[i].expect_atom("an effect name")?)) };
        let want = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(bad(format!("{head} takes {n} argument(s), got {}: {s}", args.len())))
            }
        };
        let t = match head {
            "lam" | "λ" => {
                want(2)?;
                Term::Lam(name(0)?, sub(1)?)
            }
            "app" => {
                if args.len() < 2 {
                    return Err(bad(format!("app needs a function and an argument: {s}")));
                }
                let mut acc = Term::from_sexp(&args[0])?;
                for a in &args[1..] {
                    acc = Term::app(acc, Term::from_sexp(a)?);
                }
                acc
            }
            "pair" => {
                want(2)?;
                Term::Pair(sub(0)?, sub(1)?)
            }
            "fst" => {
                want(1)?;
                Term::Fst(sub(0)?)
            }
            "snd" => {
                want(1)?;
                Term::Snd(sub(0)?)
            }
            "pred" => {
                if args.is_empty() {
                    return Err(bad("pred needs a name".into()));
                }
                let ts = args[1..].iter().map(Term::from_sexp).collect::<Result<_>>()?;
                Term::Pred(name(0)?, ts)
            }
            "const" => {
                want(1)?;
                Term::Const(name(0)?)
            }
            "forall" => {
                want(2)?;
                Term::Forall(name(0)?, sub(1)?)
            }
            "exists" => {
                want(2)?;
                Term::Exists(name(0)?, sub(1)?)
            }
            "not" => {
                want(1)?;
                Term::Not(sub(0)?)
            }
            "and" => {
                want(2)?;
                Term::And(sub(0)?, sub(1)?)
            }
            "or" => {
                want(2)?;
                Term::Or(sub(0)?, sub(1)?)
            }
            "eq" => {
                want(2)?;
                Term::Eq(sub(0)?, sub(1)?)
            }
            "if" => {
                want(3)?;
                Term::If(sub(0)?, sub(1)?, sub(2)?)
            }
            "set" => {
                let (pos, kw) = keyword_args(args)?;
                let var = match pos.as_slice() {
                    [v] => v.expect_atom("a bound variable")?.to_string(),
                    _ => return Err(bad(format!("set needs one bound variable: {s}"))),
                };
                let mut guard = None;
                let mut yield_ = None;
                for (k, v) in kw {
                    match k {
                        "where" => guard = Some(Arc::new(Term::from_sexp(v)?)),
                        "yield" => yield_ = Some(Arc::new(Term::from_sexp(v)?)),
                        _ => return Err(bad(format!("unknown set keyword :{k}"))),
                    }
                }
                Term::SetBuilder {
                    guard: guard.unwrap_or_else(|| Arc::new(Term::Bool(true))),
                    yield_: yield_.unwrap_or_else(|| Arc::new(Term::Var(var.clone()))),
                    var,
                }
            }
            "fmap" => {
                want(3)?;
                Term::EffOp(EffOp::Fmap(effect(0)?), vec![Term::from_sexp(&args[1])?, Term::from_sexp(&args[2])?])
            }
            "ap" => {
                want(3)?;
                Term::EffOp(EffOp::Ap(effect(0)?), vec![Term::from_sexp(&args[1])?, Term::from_sexp(&args[2])?])
            }
            "eta" | "mu" | "upsilon" => {
                want(2)?;
                let f = effect(0)?;
                let op = match head {
                    "eta" => EffOp::Eta(f),
                    "mu" => EffOp::Mu(f),
                    _ => EffOp::Upsilon(f),
                };
                Term::EffOp(op, vec![Term::from_sexp(&args[1])?])
            }
            "eps" => {
                want(3)?;
                Term::EffOp(EffOp::Eps(effect(0)?, effect(1)?), vec![Term::from_sexp(&args[2])?])
            }
            "lower" => {
                want(1)?;
                Term::EffOp(EffOp::Lower, vec![Term::from_sexp(&args[0])?])
            }
            "handler" | "nat" => {
                want(2)?;
                let n = name(0)?;
                let op = if head == "handler" { EffOp::Handler(n) } else { EffOp::Nat(n) };
                Term::EffOp(op, vec![Term::from_sexp(&args[1])?])
            }
            "iota" => {
                want(1)?;
                Term::Iota(sub(0)?)
            }
            "some" => {
                want(1)?;
                Term::Some(sub(0)?)
            }
            "none" => {
                want(0)?;
                Term::None
            }
            "nth" => {
                want(2)?;
                let k = args[1]
                    .expect_atom("an index")?
                    .parse::<usize>()
                    .map_err(|_| bad(format!("nth index must be a natural number: {s}")))?;
                Term::Nth(sub(0)?, k)
            }
            "cons" => {
                want(2)?;
                Term::Cons(sub(0)?, sub(1)?)
            }
            "reader" | "state" | "cont" => {
                want(2)?;
                let c = Carrier::from_name(head).unwrap();
                Term::Wrap(c, name(0)?, sub(1)?)
            }
            other => return Err(bad(format!("unknown term form {other}"))),
        };
        Ok(t)
    }

    pub fn parse(src: &str) -> Result<Term> {
        let forms = crate::sexpr::parse_all(src)?;
        match forms.as_slice() {
            [one] => Term::from_sexp(one),
            _ => Err(Error::parse(1, format!("expected exactly one term in {src:?}"))),
        }
    }
}

impl fmt::Display for Term {
    /// Prints the s-expression syntax accepted by [`Term::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::Lam(x, b) => write!(f, "(lam {x} {b})"),
            Term::App(a, b) => write!(f, "(app {a} {b})"),
            Term::Pair(a, b) => write!(f, "(pair {a} {b})"),
            Term::Fst(a) => write!(f, "(fst {a})"),
            Term::Snd(a) => write!(f, "(snd {a})"),
            Term::Pred(p, args) => {
                write!(f, "(pred {p}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Term::Const(c) => write!(f, "(const {c})"),
            Term::Bool(true) => f.write_str("true"),
            Term::Bool(false) => f.write_str("false"),
            Term::Forall(x, b) => write!(f, "(forall {x} {b})"),
            Term::Exists(x, b) => write!(f, "(exists {x} {b})"),
            Term::Not(a) => write!(f, "(not {a})"),
            Term::And(a, b) => write!(f, "(and {a} {b})"),
            Term::Or(a, b) => write!(f, "(or {a} {b})"),
            Term::Eq(a, b) => write!(f, "(eq {a} {b})"),
            Term::If(a, b, c) => write!(f, "(if {a} {b} {c})"),
            Term::SetBuilder { var, guard, yield_ } => {
                write!(f, "(set {var} :where {guard} :yield {yield_})")
            }
            Term::EffOp(op, args) => {
                match op {
                    EffOp::Fmap(x) => write!(f, "(fmap {x}"),
                    EffOp::Eta(x) => write!(f, "(eta {x}"),
                    EffOp::Mu(x) => write!(f, "(mu {x}"),
                    EffOp::Ap(x) => write!(f, "(ap {x}"),
                    EffOp::Eps(l, r) => write!(f, "(eps {l} {r}"),
                    EffOp::Upsilon(x) => write!(f, "(upsilon {x}"),
                    EffOp::Lower => write!(f, "(lower"),
                    EffOp::Handler(n) => write!(f, "(handler {n}"),
                    EffOp::Nat(n) => write!(f, "(nat {n}"),
                }?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Term::Iota(a) => write!(f, "(iota {a})"),
            Term::Some(a) => write!(f, "(some {a})"),
            Term::None => f.write_str("(none)"),
            Term::Nth(a, k) => write!(f, "(nth {a} {k})"),
            Term::Cons(a, b) => write!(f, "(cons {a} {b})"),
            Term::Wrap(c, x, b) => write!(f, "({} {x} {b})", c.name()),
        }
    }
}
