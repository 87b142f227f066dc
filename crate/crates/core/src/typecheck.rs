//! Type checking of lambda terms against declared types.
//!
//! Lambda binders carry no annotations, so checking is first-order
//! unification over types with metavariables. Reader, State and Continuation
//! carriers are unfolded to their function types only where a term applies
//! them; Writer and Product carriers unify with pairs.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::term::{EffOp, Term};
use crate::types::{Carrier, EffectId, Registry, Ty};

#[derive(Debug, Clone, PartialEq, Eq)]
enum UTy {
    Var(u32),
    Base(String),
    Arrow(Box<UTy>, Box<UTy>),
    Prod(Box<UTy>, Box<UTy>),
    Eff(EffectId, Box<UTy>),
}

impl UTy {
    fn from_ty(ty: &Ty) -> UTy {
        match ty {
            Ty::Base(b) => UTy::Base(b.clone()),
            Ty::Arrow(a, b) => UTy::Arrow(Box::new(UTy::from_ty(a)), Box::new(UTy::from_ty(b))),
            Ty::Prod(a, b) => UTy::Prod(Box::new(UTy::from_ty(a)), Box::new(UTy::from_ty(b))),
            Ty::Eff(f, inner) => UTy::Eff(f.clone(), Box::new(UTy::from_ty(inner))),
        }
    }

    fn base(name: &str) -> UTy {
        UTy::Base(name.to_string())
    }

    fn arrow(a: UTy, b: UTy) -> UTy {
        UTy::Arrow(Box::new(a), Box::new(b))
    }

    fn prod(a: UTy, b: UTy) -> UTy {
        UTy::Prod(Box::new(a), Box::new(b))
    }

    fn eff(f: &EffectId, inner: UTy) -> UTy {
        UTy::Eff(f.clone(), Box::new(inner))
    }
}

struct Checker<'a> {
    registry: &'a Registry,
    subst: HashMap<u32, UTy>,
    next: u32,
}

type Ctx = Vec<(String, UTy)>;

fn lookup<'c>(ctx: &'c Ctx, x: &str) -> Option<&'c UTy> {
    ctx.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
}

impl<'a> Checker<'a> {
    fn new(registry: &'a Registry) -> Self {
        Checker { registry, subst: HashMap::new(), next: 0 }
    }

    fn fresh(&mut self) -> UTy {
        self.next += 1;
        UTy::Var(self.next)
    }

    fn resolve(&self, t: &UTy) -> UTy {
        match t {
            UTy::Var(v) => match self.subst.get(v) {
                Some(u) => self.resolve(u),
                None => t.clone(),
            },
            _ => t.clone(),
        }
    }

    fn zonk(&self, t: &UTy) -> UTy {
        match self.resolve(t) {
            UTy::Arrow(a, b) => UTy::arrow(self.zonk(&a), self.zonk(&b)),
            UTy::Prod(a, b) => UTy::prod(self.zonk(&a), self.zonk(&b)),
            UTy::Eff(f, a) => UTy::eff(&f, self.zonk(&a)),
            other => other,
        }
    }

    fn show(&self, t: &UTy) -> String {
        fn go(t: &UTy) -> String {
            match t {
                UTy::Var(v) => format!("?{v}"),
                UTy::Base(b) => b.clone(),
                UTy::Arrow(a, b) => format!("({} -> {})", go(a), go(b)),
                UTy::Prod(a, b) => format!("({} * {})", go(a), go(b)),
                UTy::Eff(f, a) => format!("{f} {}", go(a)),
            }
        }
        go(&self.zonk(t))
    }

    fn carrier(&self, f: &EffectId) -> Result<Carrier> {
        Ok(self.registry.functor(f)?.carrier)
    }

    /// The unique registered functor with the given carrier.
    fn functor_with(&self, carrier: Carrier) -> Result<EffectId> {
        let mut found = self.registry.functors.values().filter(|d| d.carrier == carrier);
        match (found.next(), found.next()) {
            (Some(d), None) => Ok(d.id.clone()),
            (None, _) => Err(Error::eval(format!("no functor with the {} carrier is declared", carrier.name()))),
            (Some(_), Some(_)) => Err(Error::eval(format!(
                "several functors use the {} carrier; the term is ambiguous",
                carrier.name()
            ))),
        }
    }

    /// The functor to use for a carrier-specific form: taken from the
    /// expected type when it already says, otherwise the unique one.
    fn functor_for(&self, expected: &UTy, carrier: Carrier) -> Result<EffectId> {
        if let UTy::Eff(f, _) = self.resolve(expected) {
            if self.carrier(&f)? == carrier {
                return Ok(f);
            }
        }
        self.functor_with(carrier)
    }

    /// Writer and Product values are pairs.
    fn pair_view(&self, f: &EffectId, inner: &UTy) -> Result<Option<UTy>> {
        Ok(match self.carrier(f)? {
            Carrier::Writer => Some(UTy::prod(inner.clone(), UTy::base("t"))),
            Carrier::Product => Some(UTy::prod(inner.clone(), UTy::base("g"))),
            _ => None,
        })
    }

    /// Reader, State and Continuation values can be applied.
    fn fn_view(&self, f: &EffectId, inner: &UTy) -> Result<Option<UTy>> {
        Ok(match self.carrier(f)? {
            Carrier::Reader => Some(UTy::arrow(UTy::base("g"), inner.clone())),
            Carrier::State => {
                let set = self.functor_with(Carrier::Set)?;
                Some(UTy::arrow(UTy::base("s"), UTy::eff(&set, UTy::prod(inner.clone(), UTy::base("s")))))
            }
            Carrier::Cont => Some(UTy::arrow(UTy::arrow(inner.clone(), UTy::base("t")), UTy::base("t"))),
            _ => None,
        })
    }

    fn occurs(&self, v: u32, t: &UTy) -> bool {
        match self.resolve(t) {
            UTy::Var(w) => v == w,
            UTy::Base(_) => false,
            UTy::Arrow(a, b) | UTy::Prod(a, b) => self.occurs(v, &a) || self.occurs(v, &b),
            UTy::Eff(_, a) => self.occurs(v, &a),
        }
    }

    fn unify(&mut self, a: &UTy, b: &UTy) -> Result<()> {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            (UTy::Var(v), UTy::Var(w)) if v == w => Ok(()),
            (UTy::Var(v), t) | (t, UTy::Var(v)) => {
                if self.occurs(*v, t) {
                    return Err(Error::eval(format!("infinite type {} = {}", self.show(&a), self.show(&b))));
                }
                self.subst.insert(*v, t.clone());
                Ok(())
            }
            (UTy::Base(x), UTy::Base(y)) if x == y => Ok(()),
            (UTy::Arrow(a1, b1), UTy::Arrow(a2, b2)) | (UTy::Prod(a1, b1), UTy::Prod(a2, b2)) => {
                self.unify(a1, a2)?;
                self.unify(b1, b2)
            }
            (UTy::Eff(f, x), UTy::Eff(g, y)) if f == g => self.unify(x, y),
            (UTy::Eff(f, x), p @ UTy::Prod(..)) | (p @ UTy::Prod(..), UTy::Eff(f, x)) => {
                match self.pair_view(f, x)? {
                    Some(view) => self.unify(&view, p),
                    None => Err(self.mismatch(&a, &b)),
                }
            }
            _ => Err(self.mismatch(&a, &b)),
        }
    }

    fn mismatch(&self, a: &UTy, b: &UTy) -> Error {
        Error::eval(format!("cannot match {} with {}", self.show(a), self.show(b)))
    }

    /// View `t` as a function type, unfolding applicable carriers.
    fn as_function(&mut self, t: &UTy) -> Result<(UTy, UTy)> {
        match self.resolve(t) {
            UTy::Arrow(a, b) => Ok((*a, *b)),
            UTy::Eff(f, inner) => match self.fn_view(&f, &inner)? {
                Some(UTy::Arrow(a, b)) => Ok((*a, *b)),
                _ => Err(Error::eval(format!("{} is not a function", self.show(t)))),
            },
            other => {
                let (a, b) = (self.fresh(), self.fresh());
                self.unify(&other, &UTy::arrow(a.clone(), b.clone()))?;
                Ok((a, b))
            }
        }
    }

    fn as_pair(&mut self, t: &UTy) -> Result<(UTy, UTy)> {
        match self.resolve(t) {
            UTy::Prod(a, b) => Ok((*a, *b)),
            UTy::Eff(f, inner) => match self.pair_view(&f, &inner)? {
                Some(UTy::Prod(a, b)) => Ok((*a, *b)),
                _ => Err(Error::eval(format!("{} is not a pair", self.show(t)))),
            },
            other => {
                let (a, b) = (self.fresh(), self.fresh());
                self.unify(&other, &UTy::prod(a.clone(), b.clone()))?;
                Ok((a, b))
            }
        }
    }

    fn check(&mut self, ctx: &mut Ctx, term: &Term, expected: &UTy) -> Result<()> {
        match term {
            Term::Lam(x, body) => {
                let (a, b) = match self.resolve(expected) {
                    UTy::Arrow(a, b) => (*a, *b),
                    _ => {
                        let (a, b) = (self.fresh(), self.fresh());
                        self.unify(expected, &UTy::arrow(a.clone(), b.clone()))?;
                        (a, b)
                    }
                };
                ctx.push((x.clone(), a));
                let r = self.check(ctx, body, &b);
                ctx.pop();
                r
            }
            Term::Wrap(carrier, x, body) => {
                let f = self.functor_for(expected, *carrier)?;
                let inner = self.fresh();
                self.unify(expected, &UTy::eff(&f, inner.clone()))?;
                let (param, result) = match self.fn_view(&f, &inner)? {
                    Some(UTy::Arrow(a, b)) => (*a, *b),
                    _ => return Err(Error::eval(format!("{} values are not closures", carrier.name()))),
                };
                ctx.push((x.clone(), param));
                let r = self.check(ctx, body, &result);
                ctx.pop();
                r
            }
            Term::SetBuilder { var, guard, yield_ } => {
                let f = self.functor_for(expected, Carrier::Set)?;
                let inner = self.fresh();
                self.unify(expected, &UTy::eff(&f, inner.clone()))?;
                ctx.push((var.clone(), UTy::base("e")));
                let r = self
                    .check(ctx, guard, &UTy::base("t"))
                    .and_then(|_| self.check(ctx, yield_, &inner));
                ctx.pop();
                r
            }
            Term::Some(a) => {
                let f = self.functor_for(expected, Carrier::Maybe)?;
                let inner = self.fresh();
                self.unify(expected, &UTy::eff(&f, inner.clone()))?;
                self.check(ctx, a, &inner)
            }
            Term::None => {
                let f = self.functor_for(expected, Carrier::Maybe)?;
                let inner = self.fresh();
                self.unify(expected, &UTy::eff(&f, inner))
            }
            Term::Pair(a, b) => {
                let (ta, tb) = self.as_pair(expected)?;
                self.check(ctx, a, &ta)?;
                self.check(ctx, b, &tb)
            }
            Term::If(c, a, b) => {
                self.check(ctx, c, &UTy::base("t"))?;
                self.check(ctx, a, expected)?;
                self.check(ctx, b, expected)
            }
            _ => {
                let t = self.infer(ctx, term)?;
                self.unify(&t, expected)
            }
        }
    }

    fn infer(&mut self, ctx: &mut Ctx, term: &Term) -> Result<UTy> {
        let t = UTy::base("t");
        let e = UTy::base("e");
        match term {
            Term::Var(x) => lookup(ctx, x).cloned().ok_or_else(|| Error::eval(format!("unbound variable {x}"))),
            Term::App(f, a) => {
                let tf = self.infer(ctx, f)?;
                let (dom, cod) = self.as_function(&tf)?;
                self.check(ctx, a, &dom)?;
                Ok(cod)
            }
            Term::Fst(p) | Term::Snd(p) => {
                let tp = self.infer(ctx, p)?;
                let (a, b) = self.as_pair(&tp)?;
                Ok(if matches!(term, Term::Fst(_)) { a } else { b })
            }
            Term::Pred(_, args) => {
                for a in args {
                    self.check(ctx, a, &e)?;
                }
                Ok(t)
            }
            Term::Const(_) => Ok(e),
            Term::Bool(_) => Ok(t),
            Term::Forall(x, body) | Term::Exists(x, body) => {
                ctx.push((x.clone(), e));
                let r = self.check(ctx, body, &t);
                ctx.pop();
                r.map(|_| t)
            }
            Term::Not(a) => {
                self.check(ctx, a, &t)?;
                Ok(t)
            }
            Term::And(a, b) | Term::Or(a, b) => {
                self.check(ctx, a, &t)?;
                self.check(ctx, b, &t)?;
                Ok(t)
            }
            Term::Eq(a, b) => {
                let ta = self.infer(ctx, a)?;
                self.check(ctx, b, &ta)?;
                Ok(t)
            }
            Term::Iota(s) => {
                let set = self.functor_with(Carrier::Set)?;
                let maybe = self.functor_with(Carrier::Maybe)?;
                let inner = self.fresh();
                self.check(ctx, s, &UTy::eff(&set, inner.clone()))?;
                Ok(UTy::eff(&maybe, inner))
            }
            Term::Nth(s, _) => {
                let ts = self.infer(ctx, s)?;
                match self.resolve(&ts) {
                    UTy::Base(b) if b == "g" || b == "s" => Ok(e),
                    other => Err(Error::eval(format!("nth of a {}", self.show(&other)))),
                }
            }
            Term::Cons(x, s) => {
                self.check(ctx, x, &e)?;
                let ts = self.infer(ctx, s)?;
                match self.resolve(&ts) {
                    UTy::Base(b) if b == "g" || b == "s" => Ok(UTy::Base(b)),
                    other => Err(Error::eval(format!("cons onto a {}", self.show(&other)))),
                }
            }
            Term::EffOp(op, args) => self.infer_op(ctx, op, args),
            Term::Lam(..) | Term::Wrap(..) | Term::SetBuilder { .. } | Term::Some(_) | Term::None | Term::Pair(..) | Term::If(..) => {
                let v = self.fresh();
                self.check(ctx, term, &v)?;
                Ok(v)
            }
        }
    }

    fn infer_op(&mut self, ctx: &mut Ctx, op: &EffOp, args: &[Term]) -> Result<UTy> {
        if args.len() != op.arity() {
            return Err(Error::eval(format!("effect operation takes {} argument(s)", op.arity())));
        }
        let (a, b) = (self.fresh(), self.fresh());
        match op {
            EffOp::Fmap(f) => {
                self.registry.functor(f)?;
                // Argument first so that the function's domain is known.
                self.check(ctx, &args[1], &UTy::eff(f, a.clone()))?;
                self.check(ctx, &args[0], &UTy::arrow(a, b.clone()))?;
                Ok(UTy::eff(f, b))
            }
            EffOp::Eta(f) => {
                self.registry.functor(f)?;
                self.check(ctx, &args[0], &a)?;
                Ok(UTy::eff(f, a))
            }
            EffOp::Mu(f) => {
                self.registry.functor(f)?;
                self.check(ctx, &args[0], &UTy::eff(f, UTy::eff(f, a.clone())))?;
                Ok(UTy::eff(f, a))
            }
            EffOp::Ap(f) => {
                self.registry.functor(f)?;
                self.check(ctx, &args[1], &UTy::eff(f, a.clone()))?;
                self.check(ctx, &args[0], &UTy::eff(f, UTy::arrow(a, b.clone())))?;
                Ok(UTy::eff(f, b))
            }
            EffOp::Eps(l, r) => {
                if !self.registry.is_adjunction(l, r) {
                    return Err(Error::eval(format!("{l} ⊣ {r} is not a registered adjunction")));
                }
                self.check(ctx, &args[0], &UTy::eff(l, UTy::eff(r, a.clone())))?;
                Ok(a)
            }
            EffOp::Upsilon(r) => {
                self.registry.functor(r)?;
                self.check(ctx, &args[0], &UTy::eff(r, UTy::arrow(a.clone(), b.clone())))?;
                Ok(UTy::arrow(a, UTy::eff(r, b)))
            }
            EffOp::Lower => {
                let ta = self.infer(ctx, &args[0])?;
                let c = self.functor_for(&ta, Carrier::Cont)?;
                self.unify(&ta, &UTy::eff(&c, UTy::base("t")))?;
                Ok(UTy::base("t"))
            }
            EffOp::Handler(name) | EffOp::Nat(name) => {
                let n = self
                    .registry
                    .nat(name)
                    .ok_or_else(|| Error::eval(format!("unknown natural transformation {name}")))?;
                let wrap = |word: &[EffectId], core: UTy| word.iter().rev().fold(core, |acc, f| UTy::eff(f, acc));
                let (src, tgt) = (wrap(&n.source, a.clone()), wrap(&n.target, a));
                self.check(ctx, &args[0], &src)?;
                Ok(tgt)
            }
        }
    }
}

/// Check a closed term against a declared type.
pub fn check_term(registry: &Registry, term: &Term, ty: &Ty) -> Result<()> {
    let mut c = Checker::new(registry);
    c.check(&mut Vec::new(), term, &UTy::from_ty(ty))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Capabilities, FunctorDef};

    fn reg() -> Registry {
        let mut r = Registry::with_default_bases();
        for (n, c) in [("M", Carrier::Maybe), ("S", Carrier::Set), ("D", Carrier::State), ("G", Carrier::Reader), ("W", Carrier::Writer), ("C", Carrier::Cont)] {
            r.add_functor(FunctorDef::new(n, c, Capabilities::monad())).unwrap();
        }
        r
    }

    fn ok(term: &str, ty: &str) -> bool {
        check_term(&reg(), &Term::parse(term).unwrap(), &Ty::parse(ty).unwrap()).is_ok()
    }

    #[test]
    fn lexical_shapes() {
        assert!(ok("(lam p (iota (set x :where (app p x))))", "(-> (-> e t) (M e))"));
        assert!(ok("(lam p (state s (set x :where (app p x) :yield (pair x (cons x s)))))", "(-> (-> e t) (D e))"));
        assert!(ok("(reader g (nth g 0))", "(G e)"));
        assert!(ok("(lam p (cont c (not (exists x (and (app p x) (app c x))))))", "(-> (-> e t) (C e))"));
        assert!(ok("(lam x (lam p (pair x (app p x))))", "(-> e (-> (-> e t) (W e)))"));
    }

    #[test]
    fn rejects_wrong_types() {
        assert!(!ok("(lam x (pred sleep x))", "(-> e e)"));
        assert!(!ok("(lam p (iota (set x :where (app p x))))", "(-> (-> e t) (D e))"));
        assert!(!ok("(lam x x)", "(G e)"));
    }

    #[test]
    fn effect_operations() {
        assert!(ok("(lam x (lam f (fmap M f x)))", "(-> (M e) (-> (-> e t) (M t)))"));
        assert!(ok("(lam x (mu S x))", "(-> (S (S e)) (S e))"));
        assert!(ok("(lam x (lower x))", "(-> (C t) t)"));
    }
}
