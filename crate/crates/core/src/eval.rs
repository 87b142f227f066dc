//! Call-by-value evaluation of denotations over a finite model, and the
//! per-functor structure (fmap, unit, join, ap), adjunction counit, Υ,
//! lowering, handlers and natural transformations.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Entity, Model};
use crate::term::{EffOp, Term, TermRef};
use crate::types::{Carrier, EffectId, FunctorDef, NatDef, Registry, Ty};
use crate::value::{Env, Func, Native, Value};

pub struct Evaluator<'a> {
    pub registry: &'a Registry,
    pub model: &'a Model,
    free_vars: RefCell<HashMap<usize, (TermRef, Arc<BTreeSet<String>>)>>,
}

/// Evaluate a term under `env`.
pub fn eval(term: &Term, env: &Env, registry: &Registry, model: &Model) -> Result<Value> {
    Evaluator::new(registry, model).eval(term, env)
}

impl<'a> Evaluator<'a> {
    pub fn new(registry: &'a Registry, model: &'a Model) -> Self {
        Evaluator { registry, model, free_vars: RefCell::new(HashMap::new()) }
    }

    fn functor(&self, f: &EffectId) -> Result<&'a FunctorDef> {
        self.registry.functor(f)
    }

    fn require(&self, f: &EffectId, needed: &'static str) -> Result<Carrier> {
        let def = self.functor(f)?;
        let ok = match needed {
            "functor" => def.caps.functor,
            "applicative" => def.caps.applicative,
            "monad" => def.caps.monad,
            _ => false,
        };
        if ok {
            Ok(def.carrier)
        } else {
            Err(Error::Capability { functor: f.to_string(), needed })
        }
    }

    fn capture(&self, param: &str, body: &TermRef, env: &Env) -> Arc<Env> {
        let key = Arc::as_ptr(body) as usize;
        let fv = {
            let mut cache = self.free_vars.borrow_mut();
            cache
                .entry(key)
                .or_insert_with(|| (body.clone(), Arc::new(body.free_vars())))
                .1
                .clone()
        };
        let captured = fv
            .iter()
            .filter(|x| x.as_str() != param)
            .filter_map(|x| env.get(x).map(|v| (x.clone(), v.clone())))
            .collect();
        Arc::new(captured)
    }

    fn closure(&self, param: &str, body: &TermRef, env: &Env) -> Func {
        Func::Closure { param: param.to_string(), body: body.clone(), env: self.capture(param, body, env) }
    }

    fn entity_arg(&self, v: Value, what: &str) -> Result<Entity> {
        v.as_entity().ok_or_else(|| Error::eval(format!("{what} expects an entity, got a {}", v.kind())))
    }

    fn truth(&self, v: Value, what: &str) -> Result<bool> {
        v.as_bool().ok_or_else(|| Error::eval(format!("{what} expects a truth value, got a {}", v.kind())))
    }

    pub fn eval(&self, term: &Term, env: &Env) -> Result<Value> {
        match term {
            Term::Var(x) => env.get(x).cloned().ok_or_else(|| Error::eval(format!("unbound variable {x}"))),
            Term::Lam(x, body) => Ok(Value::Fn(self.closure(x, body, env))),
            Term::Wrap(carrier, x, body) => {
                let func = self.closure(x, body, env);
                match carrier {
                    Carrier::Reader => Ok(Value::ReaderV(func)),
                    Carrier::State => Ok(Value::StateV(func)),
                    Carrier::Cont => Ok(Value::ContV(func)),
                    other => Err(Error::eval(format!("{} values are not closures", other.name()))),
                }
            }
            Term::App(f, a) => {
                let fv = self.eval(f, env)?;
                let av = self.eval(a, env)?;
                self.apply(&fv, av)
            }
            Term::Pair(a, b) => Ok(Value::pair(self.eval(a, env)?, self.eval(b, env)?)),
            Term::Fst(p) | Term::Snd(p) => match self.eval(p, env)? {
                Value::PairV(a, b) => Ok(if matches!(term, Term::Fst(_)) { *a } else { *b }),
                other => Err(Error::eval(format!("projection from a {}", other.kind()))),
            },
            Term::Pred(name, args) => {
                let mut es = Vec::with_capacity(args.len());
                for a in args {
                    let v = self.eval(a, env)?;
                    es.push(self.entity_arg(v, name)?);
                }
                Ok(Value::B(self.model.holds(name, &es)?))
            }
            Term::Const(c) => Ok(Value::E(self.model.entity(c).map_err(|_| Error::eval(format!("unknown constant {c}")))?)),
            Term::Bool(b) => Ok(Value::B(*b)),
            Term::Forall(x, body) | Term::Exists(x, body) => {
                let universal = matches!(term, Term::Forall(..));
                let mut env2 = env.clone();
                for e in self.model.entities() {
                    env2.insert(x.clone(), Value::E(e));
                    let b = self.eval(body, &env2)?;
                    let b = self.truth(b, "quantifier body")?;
                    if b != universal {
                        return Ok(Value::B(!universal));
                    }
                }
                Ok(Value::B(universal))
            }
            Term::Not(a) => {
                let v = self.eval(a, env)?;
                Ok(Value::B(!self.truth(v, "not")?))
            }
            Term::And(a, b) | Term::Or(a, b) => {
                let conj = matches!(term, Term::And(..));
                let l = self.eval(a, env)?;
                let l = self.truth(l, "connective")?;
                let r = self.eval(b, env)?;
                let r = self.truth(r, "connective")?;
                Ok(Value::B(if conj { l && r } else { l || r }))
            }
            Term::Eq(a, b) => Ok(Value::B(self.eval(a, env)? == self.eval(b, env)?)),
            Term::If(c, t, e) => {
                let cv = self.eval(c, env)?;
                if self.truth(cv, "if")? {
                    self.eval(t, env)
                } else {
                    self.eval(e, env)
                }
            }
            Term::SetBuilder { var, guard, yield_ } => {
                let mut env2 = env.clone();
                let mut out = BTreeSet::new();
                for e in self.model.entities() {
                    env2.insert(var.clone(), Value::E(e));
                    let g = self.eval(guard, &env2)?;
                    if self.truth(g, "set guard")? {
                        out.insert(self.eval(yield_, &env2)?);
                    }
                }
                Ok(Value::SetV(Arc::new(out)))
            }
            Term::EffOp(op, args) => {
                if args.len() != op.arity() {
                    return Err(Error::eval(format!("effect operation {op:?} takes {} argument(s)", op.arity())));
                }
                let vals = args.iter().map(|a| self.eval(a, env)).collect::<Result<Vec<_>>>()?;
                self.eff_op(op, vals)
            }
            Term::Iota(s) => match self.eval(s, env)? {
                Value::SetV(set) if set.len() == 1 => Ok(Value::some(set.iter().next().unwrap().clone())),
                Value::SetV(_) => Ok(Value::none()),
                other => Err(Error::eval(format!("iota expects a set, got a {}", other.kind()))),
            },
            Term::Some(a) => Ok(Value::some(self.eval(a, env)?)),
            Term::None => Ok(Value::none()),
            Term::Nth(s, k) => match self.eval(s, env)? {
                Value::Seq(seq) => seq
                    .get(*k)
                    .map(|e| Value::E(*e))
                    .ok_or_else(|| Error::eval(format!("sequence of length {} has no element {k}", seq.len()))),
                other => Err(Error::eval(format!("nth expects a sequence, got a {}", other.kind()))),
            },
            Term::Cons(x, s) => {
                let xv = self.eval(x, env)?;
                let e = self.entity_arg(xv, "cons")?;
                match self.eval(s, env)? {
                    Value::Seq(mut seq) => {
                        seq.insert(0, e);
                        Ok(Value::Seq(seq))
                    }
                    other => Err(Error::eval(format!("cons expects a sequence, got a {}", other.kind()))),
                }
            }
        }
    }

    fn eff_op(&self, op: &EffOp, mut vals: Vec<Value>) -> Result<Value> {
        let last = vals.pop().unwrap();
        match op {
            EffOp::Fmap(f) => self.fmap_apply(f, &vals[0], last),
            EffOp::Ap(f) => self.ap(f, vals.pop().unwrap(), last),
            EffOp::Eta(f) => self.eta(f, last),
            EffOp::Mu(f) => self.join(f, last),
            EffOp::Eps(l, r) => self.counit(l, r, last),
            EffOp::Upsilon(r) => self.upsilon(r, last),
            EffOp::Lower => self.lower(last),
            EffOp::Handler(name) => {
                let h = self.nat_def(name)?;
                self.run_handler(h, last)
            }
            EffOp::Nat(name) => {
                let n = self.nat_def(name)?;
                self.apply_nat(n, last)
            }
        }
    }

    fn nat_def(&self, name: &str) -> Result<&'a NatDef> {
        self.registry.nat(name).ok_or_else(|| Error::eval(format!("unknown natural transformation {name}")))
    }

    /// Apply any function-like value.
    pub fn apply(&self, f: &Value, arg: Value) -> Result<Value> {
        match f.as_func() {
            Some(func) => self.call(func, arg),
            None => Err(Error::eval(format!("applying a non-function ({})", f.kind()))),
        }
    }

    fn call(&self, func: &Func, arg: Value) -> Result<Value> {
        match func {
            Func::Closure { param, body, env } => {
                let mut env2 = (**env).clone();
                env2.insert(param.clone(), arg);
                self.eval(body, &env2)
            }
            Func::Table(graph) => graph
                .get(&arg)
                .cloned()
                .ok_or_else(|| Error::eval("argument outside the domain of a finite function")),
            Func::Native(n) => self.call_native(n, arg),
        }
    }

    fn run_state(&self, m: &Value, s: Value) -> Result<Arc<BTreeSet<Value>>> {
        match self.apply(m, s)? {
            Value::SetV(out) => Ok(out),
            other => Err(Error::shape(format!("state computation returned a {}", other.kind()))),
        }
    }

    fn call_native(&self, n: &Native, arg: Value) -> Result<Value> {
        match n {
            Native::Id => Ok(arg),
            Native::Compose(f, g) => {
                let inner = self.apply(g, arg)?;
                self.apply(f, inner)
            }
            Native::ApplyTo(a) => self.apply(&arg, a.clone()),
            Native::FmapOver(fid, x) => self.fmap_apply(fid, &arg, x.clone()),
            Native::Upsilon(r, phi) => {
                let apply_to = Value::Fn(Value::native(Native::ApplyTo(arg)));
                self.fmap_apply(r, &apply_to, phi.clone())
            }
            Native::PairWith(v) => Ok(Value::pair(v.clone(), arg)),
            Native::ReaderFmap { f, x } => {
                let inner = self.apply(x, arg)?;
                self.apply(f, inner)
            }
            Native::ReaderEta(v) => Ok(v.clone()),
            Native::ReaderMu(vv) => {
                let inner = self.apply(vv, arg.clone())?;
                self.apply(&inner, arg)
            }
            Native::StateFmap { f, m } => {
                let outcomes = self.run_state(m, arg)?;
                let mut out = BTreeSet::new();
                for o in outcomes.iter() {
                    let (v, s) = split_pair(o)?;
                    out.insert(Value::pair(self.apply(f, v.clone())?, s.clone()));
                }
                Ok(Value::SetV(Arc::new(out)))
            }
            Native::StateEta(v) => Ok(Value::set([Value::pair(v.clone(), arg)])),
            Native::StateMu(mm) => {
                let outer = self.run_state(mm, arg)?;
                let mut out = BTreeSet::new();
                for o in outer.iter() {
                    let (m, s) = split_pair(o)?;
                    if !matches!(m, Value::StateV(_)) {
                        return Err(Error::shape(format!("state join over a {}", m.kind())));
                    }
                    out.extend(self.run_state(m, s.clone())?.iter().cloned());
                }
                Ok(Value::SetV(Arc::new(out)))
            }
            Native::ContFmap { f, x } => {
                let k = Value::Fn(Value::native(Native::ContFmapK { c: arg, f: f.clone() }));
                self.apply(x, k)
            }
            Native::ContFmapK { c, f } => {
                let fa = self.apply(f, arg)?;
                self.apply(c, fa)
            }
            Native::ContEta(v) => self.apply(&arg, v.clone()),
            Native::ContMu(vv) => {
                let k = Value::Fn(Value::native(Native::ContMuK(arg)));
                self.apply(vv, k)
            }
            Native::ContMuK(c) => self.apply(&arg, c.clone()),
            Native::SetToCont(m) => {
                let set = m.as_set().ok_or_else(|| Error::shape("set-to-continuation over a non-set"))?;
                for x in set.iter() {
                    let b = self.apply(&arg, x.clone())?;
                    if self.truth(b, "continuation")? {
                        return Ok(Value::B(true));
                    }
                }
                Ok(Value::B(false))
            }
        }
    }

    fn shape_error(&self, f: &EffectId, carrier: Carrier, v: &Value) -> Error {
        Error::shape(format!("{f} ({}) value expected, got a {}", carrier.name(), v.kind()))
    }

    /// `fmap_F fn v`.
    pub fn fmap_apply(&self, f: &EffectId, func: &Value, v: Value) -> Result<Value> {
        let carrier = self.require(f, "functor")?;
        if func.as_func().is_none() {
            return Err(Error::shape(format!("fmap_{f} expects a function, got a {}", func.kind())));
        }
        match (carrier, v) {
            (Carrier::Maybe, Value::MaybeV(None)) => Ok(Value::none()),
            (Carrier::Maybe, Value::MaybeV(Some(x))) => Ok(Value::some(self.apply(func, *x)?)),
            (Carrier::Set, Value::SetV(s)) => {
                let out = s.iter().map(|x| self.apply(func, x.clone())).collect::<Result<BTreeSet<_>>>()?;
                Ok(Value::SetV(Arc::new(out)))
            }
            (Carrier::State, m @ Value::StateV(_)) => {
                Ok(Value::StateV(Value::native(Native::StateFmap { f: func.clone(), m })))
            }
            (Carrier::Reader, x @ Value::ReaderV(_)) => {
                Ok(Value::ReaderV(Value::native(Native::ReaderFmap { f: func.clone(), x })))
            }
            (Carrier::Cont, x @ Value::ContV(_)) => {
                Ok(Value::ContV(Value::native(Native::ContFmap { f: func.clone(), x })))
            }
            (Carrier::Writer | Carrier::Product, Value::PairV(a, p)) => Ok(Value::PairV(Box::new(self.apply(func, *a)?), p)),
            (c, other) => Err(self.shape_error(f, c, &other)),
        }
    }

    /// Unit of an applicative functor.
    pub fn eta(&self, f: &EffectId, v: Value) -> Result<Value> {
        let carrier = self.require(f, "applicative")?;
        Ok(match carrier {
            Carrier::Maybe => Value::some(v),
            Carrier::Set => Value::set([v]),
            Carrier::State => Value::StateV(Value::native(Native::StateEta(v))),
            Carrier::Reader => Value::ReaderV(Value::native(Native::ReaderEta(v))),
            Carrier::Writer => Value::pair(v, Value::B(true)),
            Carrier::Cont => Value::ContV(Value::native(Native::ContEta(v))),
            Carrier::Product => return Err(Error::Capability { functor: f.to_string(), needed: "applicative" }),
        })
    }

    /// Monad multiplication.
    pub fn join(&self, f: &EffectId, vv: Value) -> Result<Value> {
        let carrier = self.require(f, "monad")?;
        match (carrier, vv) {
            (Carrier::Maybe, Value::MaybeV(None)) => Ok(Value::none()),
            (Carrier::Maybe, Value::MaybeV(Some(inner))) => match *inner {
                v @ Value::MaybeV(_) => Ok(v),
                other => Err(self.shape_error(f, carrier, &other)),
            },
            (Carrier::Set, Value::SetV(outer)) => {
                let mut out = BTreeSet::new();
                for s in outer.iter() {
                    match s {
                        Value::SetV(inner) => out.extend(inner.iter().cloned()),
                        other => return Err(self.shape_error(f, carrier, other)),
                    }
                }
                Ok(Value::SetV(Arc::new(out)))
            }
            (Carrier::State, mm @ Value::StateV(_)) => Ok(Value::StateV(Value::native(Native::StateMu(mm)))),
            (Carrier::Reader, vv @ Value::ReaderV(_)) => Ok(Value::ReaderV(Value::native(Native::ReaderMu(vv)))),
            (Carrier::Cont, vv @ Value::ContV(_)) => Ok(Value::ContV(Value::native(Native::ContMu(vv)))),
            (Carrier::Writer, Value::PairV(inner, q)) => match *inner {
                Value::PairV(v, p) => {
                    let p = self.truth(*p, "writer log")?;
                    let q = self.truth(*q, "writer log")?;
                    Ok(Value::PairV(v, Box::new(Value::B(p && q))))
                }
                other => Err(self.shape_error(f, carrier, &other)),
            },
            (c, other) => Err(self.shape_error(f, c, &other)),
        }
    }

    /// `vf <*> vx`, sequencing the function's effect first.
    pub fn ap(&self, f: &EffectId, vf: Value, vx: Value) -> Result<Value> {
        self.require(f, "applicative")?;
        let def = self.functor(f)?;
        if !def.caps.monad {
            return Err(Error::eval(format!("no applicative-only implementation of ap for {f}")));
        }
        let over = Value::Fn(Value::native(Native::FmapOver(f.clone(), vx)));
        let nested = self.fmap_apply(f, &over, vf)?;
        self.join(f, nested)
    }

    /// Counit of `L ⊣ R`.
    pub fn counit(&self, l: &EffectId, r: &EffectId, v: Value) -> Result<Value> {
        if !self.registry.is_adjunction(l, r) {
            return Err(Error::eval(format!("{l} ⊣ {r} is not a registered adjunction")));
        }
        let (lc, rc) = (self.functor(l)?.carrier, self.functor(r)?.carrier);
        match (lc, rc, v) {
            (Carrier::Product, Carrier::Reader, Value::PairV(reader, g)) => match *reader {
                rv @ Value::ReaderV(_) => self.apply(&rv, *g),
                other => Err(self.shape_error(r, rc, &other)),
            },
            (Carrier::Product, Carrier::Reader, other) => Err(self.shape_error(l, lc, &other)),
            (lc, rc, _) => Err(Error::eval(format!(
                "no counit for {} ⊣ {} carriers",
                lc.name(),
                rc.name()
            ))),
        }
    }

    /// Unit of `L ⊣ R`: `x ↦ R(L x)`.
    pub fn adjunction_unit(&self, l: &EffectId, r: &EffectId, v: Value) -> Result<Value> {
        if !self.registry.is_adjunction(l, r) {
            return Err(Error::eval(format!("{l} ⊣ {r} is not a registered adjunction")));
        }
        match (self.functor(l)?.carrier, self.functor(r)?.carrier) {
            (Carrier::Product, Carrier::Reader) => Ok(Value::ReaderV(Value::native(Native::PairWith(v)))),
            (lc, rc) => Err(Error::eval(format!("no unit for {} ⊣ {} carriers", lc.name(), rc.name()))),
        }
    }

    /// `Υ_R φ = λa. fmap_R (λf. f a) φ`.
    pub fn upsilon(&self, r: &EffectId, phi: Value) -> Result<Value> {
        let carrier = self.require(r, "functor")?;
        let payload_ok = match (&carrier, &phi) {
            (Carrier::Maybe, Value::MaybeV(None)) => true,
            (Carrier::Maybe, Value::MaybeV(Some(f))) => f.as_func().is_some(),
            (Carrier::Set, Value::SetV(s)) => s.iter().all(|f| f.as_func().is_some()),
            (Carrier::Writer | Carrier::Product, Value::PairV(f, _)) => f.as_func().is_some(),
            (Carrier::State, Value::StateV(_)) | (Carrier::Reader, Value::ReaderV(_)) | (Carrier::Cont, Value::ContV(_)) => true,
            _ => return Err(self.shape_error(r, carrier, &phi)),
        };
        if !payload_ok {
            return Err(Error::shape(format!("Υ_{r} expects a function inside the effect")));
        }
        Ok(Value::Fn(Value::native(Native::Upsilon(r.clone(), phi))))
    }

    /// `⇓`: run a continuation over truth values with the identity
    /// continuation.
    pub fn lower(&self, v: Value) -> Result<Value> {
        match &v {
            Value::ContV(_) => {
                let id = Value::Fn(Value::native(Native::Id));
                match self.apply(&v, id)? {
                    b @ Value::B(_) => Ok(b),
                    other => Err(Error::shape(format!("lowering needs a continuation over t, result was a {}", other.kind()))),
                }
            }
            other => Err(Error::shape(format!("lowering expects a continuation, got a {}", other.kind()))),
        }
    }

    pub fn run_handler(&self, h: &NatDef, v: Value) -> Result<Value> {
        if !h.is_handler {
            return Err(Error::eval(format!("{} is not a handler", h.name)));
        }
        let f = h
            .source
            .first()
            .ok_or_else(|| Error::eval(format!("handler {} has no source functor", h.name)))?;
        let carrier = self.functor(f)?.carrier;
        match (h.component.as_str(), carrier, v) {
            ("choose-min" | "choose-max", Carrier::Set, Value::SetV(s)) => {
                let pick = if h.component == "choose-min" { s.iter().next() } else { s.iter().next_back() };
                pick.cloned().ok_or_else(|| Error::eval(format!("{}: nothing to choose from", h.name)))
            }
            ("choose-min" | "choose-max", Carrier::State, m @ Value::StateV(_)) => {
                let outcomes = self.run_state(&m, Value::Seq(self.model.initial_state.clone()))?;
                let values: BTreeSet<Value> =
                    outcomes.iter().map(|o| split_pair(o).map(|(v, _)| v.clone())).collect::<Result<_>>()?;
                let pick = if h.component == "choose-min" { values.iter().next() } else { values.iter().next_back() };
                pick.cloned().ok_or_else(|| Error::eval(format!("{}: nothing to choose from", h.name)))
            }
            ("maybe-default", Carrier::Maybe, Value::MaybeV(Some(x))) => Ok(*x),
            ("maybe-default", Carrier::Maybe, Value::MaybeV(None)) => match &h.default {
                Some(t) => self.eval(t, &Env::new()),
                None => Err(Error::eval(format!("{} has no declared default", h.name))),
            },
            ("lower", Carrier::Cont, v) => self.lower(v),
            ("run-reader", Carrier::Reader, v @ Value::ReaderV(_)) => {
                self.apply(&v, Value::Seq(self.model.initial_assignment.clone()))
            }
            ("writer-value", Carrier::Writer, Value::PairV(a, _)) => Ok(*a),
            (comp, c, v) => Err(Error::shape(format!(
                "handler {} ({comp}) cannot handle a {} as {}",
                h.name,
                v.kind(),
                c.name()
            ))),
        }
    }

    /// Run the effect layers of a value of type `ty` far enough to print
    /// and compare it: state computations start from the model's initial
    /// state and yield their outcome set, readers read the initial
    /// assignment, and continuations over `t` are lowered.
    pub fn observe(&self, ty: &Ty, v: Value) -> Result<Value> {
        let Ty::Eff(f, inner) = ty else { return Ok(v) };
        let carrier = self.functor(f)?.carrier;
        match (carrier, v) {
            (Carrier::Maybe, Value::MaybeV(Some(x))) => Ok(Value::some(self.observe(inner, *x)?)),
            (Carrier::Set, Value::SetV(s)) => {
                Ok(Value::set(s.iter().map(|x| self.observe(inner, x.clone())).collect::<Result<Vec<_>>>()?))
            }
            (Carrier::State, m @ Value::StateV(_)) => {
                let outcomes = self.run_state(&m, Value::Seq(self.model.initial_state.clone()))?;
                let mut out = Vec::new();
                for o in outcomes.iter() {
                    let (x, s) = split_pair(o)?;
                    out.push(Value::pair(self.observe(inner, x.clone())?, s.clone()));
                }
                Ok(Value::set(out))
            }
            (Carrier::Reader, r @ Value::ReaderV(_)) => {
                let x = self.apply(&r, Value::Seq(self.model.initial_assignment.clone()))?;
                self.observe(inner, x)
            }
            (Carrier::Cont, k @ Value::ContV(_)) if **inner == Ty::t() => self.lower(k),
            (Carrier::Writer | Carrier::Product, Value::PairV(x, w)) => Ok(Value::pair(self.observe(inner, *x)?, *w)),
            (_, v) => Ok(v),
        }
    }

    pub fn apply_nat(&self, n: &NatDef, v: Value) -> Result<Value> {
        if n.is_handler {
            return self.run_handler(n, v);
        }
        match (n.component.as_str(), v) {
            ("id", v) => Ok(v),
            ("some-of", m @ Value::SetV(_)) => Ok(Value::ContV(Value::native(Native::SetToCont(m)))),
            ("maybe-to-set", Value::MaybeV(x)) => Ok(Value::set(x.map(|b| *b))),
            (comp, v) => Err(Error::shape(format!("{} ({comp}) cannot transform a {}", n.name, v.kind()))),
        }
    }
}

fn split_pair(v: &Value) -> Result<(&Value, &Value)> {
    match v {
        Value::PairV(a, b) => Ok((a, b)),
        other => Err(Error::shape(format!("expected a pair, got a {}", other.kind()))),
    }
}

/// Built-in component names accepted by `(nat ... :impl <name>)`.
pub const BUILTIN_NATS: &[&str] =
    &["choose-min", "choose-max", "maybe-default", "lower", "run-reader", "writer-value", "id", "some-of", "maybe-to-set"];
