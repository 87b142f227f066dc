//! Language files: base types, effect functors, adjunctions, natural
//! transformations and typed lexical entries.
//!
//! ```text
//! (functor M :caps (monad) :carrier maybe :commutative true)
//! (adjunction P G)
//! (nat first :from (S) :to () :handler true :impl choose-min)
//! (word "the" :type (-> (-> e t) (M e)) :term (lam p (iota (set x :where (app p x)))) :cat Det)
//! ```

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::{Evaluator, BUILTIN_NATS};
use crate::model::Model;
use crate::sexpr::{keyword_args, parse_all, Sexp};
use crate::term::Term;
use crate::typecheck::check_term;
use crate::types::{Applicability, Capabilities, Carrier, EffectId, FunctorDef, NatDef, Registry, Ty, TyPattern};
use crate::value::Value;

#[derive(Debug, Clone, PartialEq)]
pub struct LexEntry {
    /// The surface form as written; multi-token entries contain spaces.
    pub surface: String,
    pub ty: Ty,
    pub term: Term,
    pub category: Option<String>,
}

impl LexEntry {
    pub fn tokens(&self) -> Vec<String> {
        tokenize(&self.surface)
    }
}

/// Lowercase, then split on whitespace.
pub fn tokenize(s: &str) -> Vec<String> {
    s.to_lowercase().split_whitespace().map(str::to_string).collect()
}

/// Deep count of effect constructors in a type.
pub fn effect_rank(ty: &Ty) -> usize {
    match ty {
        Ty::Base(_) => 0,
        Ty::Arrow(a, b) | Ty::Prod(a, b) => effect_rank(a) + effect_rank(b),
        Ty::Eff(_, inner) => 1 + effect_rank(inner),
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Lexicon {
    pub entries: Vec<LexEntry>,
    pub registry: Registry,
    /// `m_L`: the largest deep effect count of any entry type.
    pub max_effect_rank: usize,
    /// Longest entry, in tokens.
    pub max_entry_tokens: usize,
    index: HashMap<Vec<String>, Vec<usize>>,
}

impl Lexicon {
    pub fn new(registry: Registry) -> Self {
        Lexicon { registry, ..Default::default() }
    }

    /// Type-check and add an entry.
    pub fn add_entry(&mut self, entry: LexEntry) -> Result<()> {
        let fail = |msg: String| Error::TypeCheck { entry: entry.surface.clone(), msg };
        self.registry.check_well_formed(&entry.ty).map_err(|e| fail(e.to_string()))?;
        check_term(&self.registry, &entry.term, &entry.ty).map_err(|e| fail(e.to_string()))?;
        let tokens = entry.tokens();
        if tokens.is_empty() {
            return Err(fail("empty surface form".into()));
        }
        self.max_effect_rank = self.max_effect_rank.max(effect_rank(&entry.ty));
        self.max_entry_tokens = self.max_entry_tokens.max(tokens.len());
        self.index.entry(tokens).or_default().push(self.entries.len());
        self.entries.push(entry);
        Ok(())
    }

    /// Entries for a single token.
    pub fn lookup(&self, token: &str) -> Vec<&LexEntry> {
        self.lookup_seq(&tokenize(token))
    }

    /// Entries whose surface is exactly the given token sequence.
    pub fn lookup_seq(&self, tokens: &[String]) -> Vec<&LexEntry> {
        let key: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
        self.index
            .get(&key)
            .map(|ix| ix.iter().map(|&i| &self.entries[i]).collect())
            .unwrap_or_default()
    }

    pub fn parse(src: &str) -> Result<Lexicon> {
        let forms = parse_all(src)?;
        let mut reg = Registry::with_default_bases();
        let mut adjunctions = Vec::new();
        let mut nats = Vec::new();
        let mut words = Vec::new();
        for f in &forms {
            let items = f.expect_list("a declaration")?;
            match f.head() {
                Some("base-type") => match &items[1..] {
                    [name] => {
                        reg.base_types.insert(name.expect_atom("a base type name")?.to_string());
                    }
                    _ => return Err(Error::parse(f.line(), "base-type takes one name")),
                },
                Some("functor") => reg.add_functor(read_functor(f, items)?)?,
                Some("adjunction") => match &items[1..] {
                    [l, r] => adjunctions.push((
                        EffectId::new(l.expect_atom("a functor")?),
                        EffectId::new(r.expect_atom("a functor")?),
                    )),
                    _ => return Err(Error::parse(f.line(), "adjunction takes two functors")),
                },
                Some("nat") => nats.push(read_nat(f, items)?),
                Some("word") => words.push(read_word(f, items)?),
                _ => return Err(Error::parse(f.line(), format!("unknown declaration {f}"))),
            }
        }
        for (l, r) in &adjunctions {
            reg.add_adjunction(l, r)?;
        }
        for n in nats {
            check_nat(&reg, &n)?;
            if reg.nat(&n.name).is_some() {
                return Err(Error::Registry(format!("natural transformation {} declared twice", n.name)));
            }
            reg.nats.push(n);
        }
        check_handler_laws(&reg)?;
        let mut lex = Lexicon::new(reg);
        for w in words {
            lex.add_entry(w)?;
        }
        Ok(lex)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Lexicon> {
        let src = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Registry(format!("cannot read {}: {e}", path.as_ref().display())))?;
        Lexicon::parse(&src)
    }

    /// Serialize in the format read by [`Lexicon::parse`].
    pub fn to_source(&self) -> String {
        let reg = &self.registry;
        let mut out = String::new();
        for b in &reg.base_types {
            if !["e", "t", "g", "s", "⊥"].contains(&b.as_str()) {
                out.push_str(&format!("(base-type {b})\n"));
            }
        }
        for d in reg.functors.values() {
            let mut caps = Vec::new();
            for (on, name) in [
                (d.caps.functor, "functor"),
                (d.caps.applicative, "applicative"),
                (d.caps.monad, "monad"),
                (d.caps.comonad, "comonad"),
            ] {
                if on {
                    caps.push(name);
                }
            }
            let applies = match &d.applicability {
                Applicability::All => "*".to_string(),
                Applicability::Pattern(p) => p.to_sexpr(),
            };
            out.push_str(&format!(
                "(functor {} :caps ({}) :carrier {} :commutative {} :external {} :applies-to {})\n",
                d.id,
                caps.join(" "),
                d.carrier.name(),
                d.commutative,
                d.external,
                applies
            ));
        }
        for (l, r) in &reg.adjunctions {
            out.push_str(&format!("(adjunction {l} {r})\n"));
        }
        for n in &reg.nats {
            let word = |w: &[EffectId]| w.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" ");
            out.push_str(&format!(
                "(nat {} :from ({}) :to ({}) :handler {} :impl {}",
                n.name,
                word(&n.source),
                word(&n.target),
                n.is_handler,
                n.component
            ));
            if let Some(d) = &n.default {
                out.push_str(&format!(" :default {d}"));
            }
            out.push_str(")\n");
        }
        for w in &self.entries {
            out.push_str(&format!("(word {:?} :type {} :term {}", w.surface, w.ty.to_sexpr(), w.term));
            if let Some(c) = &w.category {
                out.push_str(&format!(" :cat {c}"));
            }
            out.push_str(")\n");
        }
        out
    }
}

/// Load a language file.
pub fn load_language(path: impl AsRef<Path>) -> Result<Lexicon> {
    Lexicon::load(path)
}

fn bool_arg(v: &Sexp) -> Result<bool> {
    match v.as_atom() {
        Some("true") => Ok(true),
        Some("false") => Ok(false),
        _ => Err(Error::parse(v.line(), format!("expected true or false, found {v}"))),
    }
}

fn effect_word(v: &Sexp) -> Result<Vec<EffectId>> {
    v.expect_list("a list of functors")?
        .iter()
        .map(|x| Ok(EffectId::new(x.expect_atom("a functor name")?)))
        .collect()
}

fn read_functor(f: &Sexp, items: &[Sexp]) -> Result<FunctorDef> {
    let (pos, kw) = keyword_args(&items[1..])?;
    let name = match pos.as_slice() {
        [n] => n.expect_atom("a functor name")?,
        _ => return Err(Error::parse(f.line(), "functor takes one name")),
    };
    let mut caps = Capabilities::default();
    let mut carrier = None;
    let mut commutative = false;
    let mut external = false;
    let mut applicability = Applicability::All;
    for (k, v) in kw {
        match k {
            "caps" => {
                for c in v.expect_list("a capability list")? {
                    match c.expect_atom("a capability")? {
                        "functor" => caps.functor = true,
                        "applicative" => caps.applicative = true,
                        "monad" => caps.monad = true,
                        "comonad" => caps.comonad = true,
                        other => return Err(Error::parse(c.line(), format!("unknown capability {other}"))),
                    }
                }
            }
            "carrier" => {
                let c = v.expect_atom("a carrier name")?;
                carrier = Some(Carrier::from_name(c).ok_or_else(|| Error::parse(v.line(), format!("unknown carrier {c}")))?);
            }
            "commutative" => commutative = bool_arg(v)?,
            "external" => external = bool_arg(v)?,
            "applies-to" => {
                if v.as_atom() != Some("*") {
                    applicability = Applicability::Pattern(TyPattern::from_sexp(v)?);
                }
            }
            other => return Err(Error::parse(v.line(), format!("unknown functor keyword :{other}"))),
        }
    }
    let carrier = carrier.ok_or_else(|| Error::parse(f.line(), format!("functor {name} needs a :carrier")))?;
    let mut def = FunctorDef::new(name, carrier, caps);
    if (def.caps.monad || def.caps.applicative) && !carrier.supports_monad() {
        return Err(Error::Registry(format!("the {} carrier of {name} has no unit", carrier.name())));
    }
    if def.caps.comonad {
        return Err(Error::Registry(format!("no comonadic carrier is available for {name}")));
    }
    if !def.caps.functor {
        return Err(Error::Registry(format!("{name} declares no capabilities")));
    }
    def.commutative = commutative && def.caps.monad;
    def.external = external;
    def.applicability = applicability;
    Ok(def)
}

fn read_nat(f: &Sexp, items: &[Sexp]) -> Result<NatDef> {
    let (pos, kw) = keyword_args(&items[1..])?;
    let name = match pos.as_slice() {
        [n] => n.expect_atom("a name")?.to_string(),
        _ => return Err(Error::parse(f.line(), "nat takes one name")),
    };
    let mut n = NatDef {
        name,
        source: Vec::new(),
        target: Vec::new(),
        is_handler: false,
        component: String::new(),
        default: None,
    };
    for (k, v) in kw {
        match k {
            "from" => n.source = effect_word(v)?,
            "to" => n.target = effect_word(v)?,
            "handler" => n.is_handler = bool_arg(v)?,
            "impl" => n.component = v.expect_atom("a component name")?.to_string(),
            "default" => n.default = Some(Term::from_sexp(v)?),
            other => return Err(Error::parse(v.line(), format!("unknown nat keyword :{other}"))),
        }
    }
    if n.component.is_empty() {
        return Err(Error::parse(f.line(), format!("nat {} needs an :impl", n.name)));
    }
    Ok(n)
}

fn read_word(f: &Sexp, items: &[Sexp]) -> Result<LexEntry> {
    let (pos, kw) = keyword_args(&items[1..])?;
    let surface = match pos.as_slice() {
        [Sexp::Str(s, _)] => s.clone(),
        [Sexp::Atom(s, _)] => s.clone(),
        _ => return Err(Error::parse(f.line(), "word takes one surface form")),
    };
    let (mut ty, mut term, mut category) = (None, None, None);
    for (k, v) in kw {
        match k {
            "type" => ty = Some(Ty::from_sexp(v)?),
            "term" => term = Some(Term::from_sexp(v)?),
            "cat" => category = Some(v.expect_atom("a category")?.to_string()),
            other => return Err(Error::parse(v.line(), format!("unknown word keyword :{other}"))),
        }
    }
    Ok(LexEntry {
        ty: ty.ok_or_else(|| Error::parse(f.line(), format!("word {surface:?} needs a :type")))?,
        term: term.ok_or_else(|| Error::parse(f.line(), format!("word {surface:?} needs a :term")))?,
        surface,
        category,
    })
}

fn check_nat(reg: &Registry, n: &NatDef) -> Result<()> {
    for f in n.source.iter().chain(&n.target) {
        reg.functor(f)?;
    }
    if !BUILTIN_NATS.contains(&n.component.as_str()) {
        return Err(Error::Registry(format!("{}: unknown implementation {}", n.name, n.component)));
    }
    if n.is_handler && (!n.target.is_empty() || n.source.len() != 1) {
        return Err(Error::Registry(format!("handler {} must map one functor to the identity", n.name)));
    }
    if n.component == "maybe-default" && n.default.is_none() {
        return Err(Error::Registry(format!("{} needs a :default", n.name)));
    }
    Ok(())
}

/// Spot-check `h ∘ η = id` for every handler on three values.
fn check_handler_laws(reg: &Registry) -> Result<()> {
    let mut model = Model::new();
    for name in ["x0", "x1", "x2"] {
        model.add_entity(name)?;
    }
    let ev = Evaluator::new(reg, &model);
    for h in reg.nats.iter().filter(|n| n.is_handler) {
        let f = &h.source[0];
        let law = |msg: String| Error::HandlerLaw { handler: h.name.clone(), msg };
        let samples: Vec<Value> = if reg.functor(f)?.carrier == Carrier::Cont {
            vec![Value::B(true), Value::B(false), Value::B(true)]
        } else {
            model.entities().map(Value::E).collect()
        };
        for v in samples {
            let unit = ev.eta(f, v.clone()).map_err(|e| law(e.to_string()))?;
            let back = ev.run_handler(h, unit).map_err(|e| law(e.to_string()))?;
            if back != v {
                return Err(law(format!("{} came back as {}", v.show(&model), back.show(&model))));
            }
        }
    }
    Ok(())
}
